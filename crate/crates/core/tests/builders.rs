use std::sync::Arc;

use imcmc::diagnostics::moment_estimates;
use imcmc::samplers::{build_sampler, nested_gaussians, GaussianBlock, SamplerKind, SamplerSpec, TargetHandle};
use imcmc::targets::{Bivariate, Exponential, StdNormal};
use imcmc::{run_chains, AuxiliaryConditional, Error};

const STEPS: usize = 20_000;
const CHAINS: usize = 4;

fn pooled(kind: SamplerKind, target: &TargetHandle, x0: Vec<f64>, seed: u64) -> Vec<Vec<f64>> {
    let built = build_sampler(&SamplerSpec::new(kind), target).unwrap();
    let inits = vec![built.init(x0); CHAINS];
    let traces = run_chains(built.transition.as_ref(), built.density.as_ref(), &inits, STEPS, seed, None).unwrap();
    traces.into_iter().flat_map(|t| t.x.into_iter().skip(1000)).collect()
}

fn normal_handle(d: usize) -> TargetHandle {
    let mut h = TargetHandle::new(Arc::new(StdNormal::new(d)));
    if d == 1 {
        h.cdf = Some(Arc::new(StdNormal::new(1)));
    }
    h
}

#[test]
fn continuous_builders_recover_standard_normal_moments() {
    use SamplerKind::*;
    let kinds = [Rwm, Mala, IrrMala, Hmc, Rmhmc, Neutra, NiceMc, L2hmc, IrrNiceMc, PersistentHmc, LookAhead, Mtm];
    for (i, kind) in kinds.into_iter().enumerate() {
        let s = pooled(kind, &normal_handle(2), vec![0.3, -0.2], 100 + i as u64);
        let (mean, cov) = moment_estimates(&s).unwrap();
        for k in 0..2 {
            assert!(mean[k].abs() < 0.12, "{kind}: mean[{k}] = {}", mean[k]);
            assert!((cov[k][k] - 1.0).abs() < 0.15, "{kind}: var[{k}] = {}", cov[k][k]);
        }
    }
}

#[test]
fn one_dimensional_builders() {
    for (i, kind) in [SamplerKind::GuidedWalk, SamplerKind::Cdf].into_iter().enumerate() {
        let s = pooled(kind, &normal_handle(1), vec![0.1], 200 + i as u64);
        let (mean, cov) = moment_estimates(&s).unwrap();
        assert!(mean[0].abs() < 0.1, "{kind}: {}", mean[0]);
        assert!((cov[0][0] - 1.0).abs() < 0.12, "{kind}: {}", cov[0][0]);
    }
}

fn bivariate_handle(rho: f64) -> TargetHandle {
    let b = Bivariate { rho };
    let conds: Vec<Arc<dyn AuxiliaryConditional>> = (0..2)
        .map(|k| {
            let sd = b.conditional(0.0).1.sqrt();
            Arc::new(GaussianBlock::new(format!("x{k} | rest"), 0, 1, move |z| vec![b.conditional(z.x[1 - k]).0], move |_| sd))
                as Arc<dyn AuxiliaryConditional>
        })
        .collect();
    let mut h = TargetHandle::new(Arc::new(b));
    h.conditionals = Some(conds);
    h
}

#[test]
fn gibbs_scans_recover_correlation() {
    let h = bivariate_handle(0.8);
    for scan in [0.0, 1.0, 2.0] {
        let built = build_sampler(&SamplerSpec::new(SamplerKind::Gibbs).with("scan", scan), &h).unwrap();
        let inits = vec![built.init(vec![0.0, 0.0]); CHAINS];
        let traces = run_chains(built.transition.as_ref(), built.density.as_ref(), &inits, STEPS, 5, None).unwrap();
        let s: Vec<Vec<f64>> = traces.into_iter().flat_map(|t| t.x).collect();
        let (_, cov) = moment_estimates(&s).unwrap();
        assert!((cov[0][1] - 0.8).abs() < 0.06, "scan {scan}: {}", cov[0][1]);
        assert!((cov[1][1] - 1.0).abs() < 0.1, "scan {scan}: {}", cov[1][1]);
    }
}

#[test]
fn transdimensional_builders_balance_models() {
    let mut h = TargetHandle::new(Arc::new(StdNormal::new(1)));
    h.models = Some(Arc::new(nested_gaussians(1.0).unwrap()));
    for kind in [SamplerKind::Rjmcmc, SamplerKind::Nrj] {
        let built = build_sampler(&SamplerSpec::new(kind), &h).unwrap();
        let inits = vec![built.init(vec![0.0]); CHAINS];
        let traces = run_chains(built.transition.as_ref(), built.density.as_ref(), &inits, STEPS, 9, None).unwrap();
        let ks: Vec<i64> = traces.iter().flat_map(|t| t.tags.iter().map(|g| g[0])).collect();
        let p0 = ks.iter().filter(|k| **k == 0).count() as f64 / ks.len() as f64;
        assert!((p0 - 0.5).abs() < 0.03, "{kind}: {p0}");
    }
}

#[test]
fn exponential_cdf_kernel_mean() {
    let mut h = TargetHandle::new(Arc::new(Exponential { rate: 1.0 }));
    h.cdf = Some(Arc::new(Exponential { rate: 1.0 }));
    let built = build_sampler(&SamplerSpec::new(SamplerKind::Cdf), &h).unwrap();
    let t = imcmc::run_chain(built.transition.as_ref(), built.density.as_ref(), &built.init(vec![1.0]), 100_000, 0).unwrap();
    let m = t.column(0).iter().sum::<f64>() / t.len() as f64;
    assert!((m - 1.0).abs() < 0.02, "{m}");
}

#[test]
fn configuration_errors_are_reported() {
    assert!(matches!(
        build_sampler(&SamplerSpec::new(SamplerKind::Cdf), &TargetHandle::new(Arc::new(StdNormal::new(2)))),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        build_sampler(&SamplerSpec::new(SamplerKind::Gibbs), &TargetHandle::new(Arc::new(StdNormal::new(2)))),
        Err(Error::Config(_))
    ));
    assert!(build_sampler(&SamplerSpec::new(SamplerKind::Hmc).with("eps", -1.0), &normal_handle(2)).is_err());
    assert!(build_sampler(&SamplerSpec::new(SamplerKind::IrrNiceMc).with("alpha", 1.5), &normal_handle(2)).is_err());
    assert!("nuts".parse::<SamplerKind>().is_err());
}
