//! Finite-state analogs of every sampler builder, plus the involutions used
//! by the self-check suites. Each analog runs the real builder on a small
//! lattice, so its transition matrix can be enumerated exactly.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::density::{FnDensity, LogDensity};
use crate::diagnostics::{lump, transition_matrix, KeySpec, StateSpace, TransitionMatrix};
use crate::error::Result;
use crate::kernel::{AcceptanceRule, AuxiliaryConditional, Transition};
use crate::maps::{
    AffineMap, AffinePullback, Cdf1d, CouplingMap, DirectionAugment, Embed, FlipTag, FlowMap, FnMetric,
    HamiltonianInvolution, Identity, ImplicitLeapfrog, Inverse, Involution, IrrMalaMap, LatticeCoupling,
    LatticeLeapfrog, Leapfrog, LeapfrogConfig, MixtureInvolution, NegateV, Slot, Swap, TablePermutation,
    XPermutation,
};
use crate::point::{JointPoint, Layout, TagKind};
use crate::samplers::{
    make_directional_map, make_embedded_flow, make_gibbs, make_hamiltonian, make_irr_mala_with, make_lifted,
    make_look_ahead, make_mh, make_mixture_proposal, make_multiple_try, make_persistent, make_sample_adaptive,
    make_transdimensional, uniform_choice, Aggregate, CdfKernel, DiscreteSlot, DiscreteTag, ElementSwap, Empty,
    JumpMode, MatrixProposal, ModelSpace, Proposal, ProposalAux, Scan, Source, SweepMove, TableProposal, TrialSwap,
};
use crate::targets::{GridTarget, Mog2, StdNormal, TableTarget};
use crate::ImcmcKernel;

/// What the oracle should find for detailed balance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Reversible,
    /// A composition whose analog measurably violates detailed balance.
    Irreversible,
}

pub struct FiniteCase {
    pub name: &'static str,
    pub transition: Arc<dyn Transition>,
    pub space: StateSpace,
    /// Stationary probabilities of the keyed states.
    pub weights: Vec<f64>,
    pub expect: Expect,
}

impl FiniteCase {
    pub fn matrix(&self) -> Result<TransitionMatrix> {
        transition_matrix(self.transition.as_ref(), &self.space)
    }
}

fn case(
    name: &'static str,
    transition: Arc<dyn Transition>,
    states: Vec<JointPoint>,
    keys: KeySpec,
    weight: impl Fn(&JointPoint) -> f64,
    expect: Expect,
) -> Result<FiniteCase> {
    let w: Vec<f64> = states.iter().map(&weight).collect();
    let s: f64 = w.iter().sum();
    Ok(FiniteCase {
        name,
        transition,
        space: StateSpace::new(states, keys)?,
        weights: w.into_iter().map(|a| a / s).collect(),
        expect,
    })
}

const P2: [f64; 2] = [2.0 / 3.0, 1.0 / 3.0];
const P3: [f64; 3] = [0.5, 0.3, 0.2];
const P5: [f64; 5] = [0.1, 0.3, 0.2, 0.25, 0.15];
const Q3: [[f64; 3]; 3] = [[0.2, 0.5, 0.3], [0.4, 0.2, 0.4], [0.3, 0.3, 0.4]];
const KICK5: [i64; 5] = [1, 0, -1, 0, 1];
/// Integer momentum pmf on {-2, ..., 2}.
const MOM: [(f64, f64); 5] = [(-2.0, 0.1), (-1.0, 0.2), (0.0, 0.4), (1.0, 0.2), (2.0, 0.1)];
/// Momentum pmf on {0, 1, 2} for the coupling analogs.
const MOM3: [(f64, f64); 3] = [(0.0, 0.5), (1.0, 0.3), (2.0, 0.2)];
const LOGVOL5: [f64; 5] = [0.3, -0.2, 0.1, -0.4, 0.2];

fn table(p: &[f64]) -> Arc<dyn LogDensity> {
    Arc::new(TableTarget::new_1d(p.to_vec()).expect("valid table"))
}

fn q3() -> Arc<MatrixProposal> {
    Arc::new(MatrixProposal { rows: Q3.iter().map(|r| r.to_vec()).collect() })
}

/// Per-cell density p[x] / exp(logvol[x]) on 0..n.
fn cell_density(p: &'static [f64], logvol: &'static [f64]) -> Arc<dyn LogDensity> {
    Arc::new(FnDensity::new(1, move |x| {
        let i = x[0];
        if i.fract() != 0.0 || i < 0.0 || i >= p.len() as f64 {
            return f64::NEG_INFINITY;
        }
        p[i as usize].ln() - logvol[i as usize]
    }))
}

fn pmf_of(table: &[(f64, f64)], a: f64) -> f64 {
    table.iter().filter(|(b, _)| *b == a).map(|(_, p)| p).sum()
}

fn momentum(pmf: &'static [(f64, f64)]) -> Arc<dyn AuxiliaryConditional> {
    Arc::new(DiscreteSlot::new("lattice momentum", Slot::V(0), move |_| pmf.to_vec()))
}

/// v[1] ~ (1-α) δ_{v[0]} + α m.
fn lazy_refresh(pmf: &'static [(f64, f64)], alpha: f64) -> Arc<dyn AuxiliaryConditional> {
    Arc::new(DiscreteSlot::new("lazy refresh", Slot::V(1), move |z| {
        let mut s = vec![(z.v[0], 1.0 - alpha)];
        s.extend(pmf.iter().map(|(a, p)| (*a, alpha * p)));
        s
    }))
}

fn points_1d(n: usize, v_len: usize, tags: &[i64]) -> Vec<JointPoint> {
    (0..n).map(|i| JointPoint::new(vec![i as f64]).with_v(vec![0.0; v_len]).with_tags(tags.to_vec())).collect()
}

fn x_weight(p: &'static [f64]) -> impl Fn(&JointPoint) -> f64 {
    move |z| p[z.x[0] as usize]
}

/// States (x, d) with x < n and d = +1 first.
fn points_xd(n: usize, v_len: usize) -> Vec<JointPoint> {
    [1, -1].iter().flat_map(|&d| points_1d(n, v_len, &[d])).collect()
}

/// States (x, v[0], d) over a momentum table, v[1] unused.
fn points_xvd(n: usize, pmf: &[(f64, f64)]) -> Vec<JointPoint> {
    let mut out = Vec::new();
    for d in [1, -1] {
        for x in 0..n {
            for (a, _) in pmf {
                out.push(JointPoint::new(vec![x as f64]).with_v(vec![*a, 0.0]).with_tags(vec![d]));
            }
        }
    }
    out
}

fn xvd_keys() -> KeySpec {
    KeySpec::x_only().with_v(vec![0]).with_tags(vec![0])
}

fn xvd_weight(p: &'static [f64], pmf: &'static [(f64, f64)]) -> impl Fn(&JointPoint) -> f64 {
    move |z| p[z.x[0] as usize] * pmf_of(pmf, z.v[0])
}

/// Drops the Hastings correction: the proposal still samples from its real
/// rows but reports a constant density.
struct NoHastings(Arc<dyn Proposal>);

impl Proposal for NoHastings {
    fn sample(&self, from: &[f64], rng: &mut dyn Rng) -> Vec<f64> {
        self.0.sample(from, rng)
    }
    fn log_q(&self, _to: &[f64], _from: &[f64]) -> f64 {
        0.0
    }
    fn support(&self, from: &[f64]) -> Option<Vec<(Vec<f64>, f64)>> {
        self.0.support(from)
    }
}

/// Discrete uniform on 0..n seen through its CDF i/n.
#[derive(Clone, Copy, Debug)]
pub struct DiscreteUniformCdf {
    pub n: usize,
}

impl Cdf1d for DiscreteUniformCdf {
    fn cdf(&self, x: f64) -> f64 {
        x / self.n as f64
    }
    fn quantile(&self, u: f64) -> f64 {
        (u * self.n as f64).floor()
    }
}

fn mh_flip() -> Result<FiniteCase> {
    let q = Arc::new(MatrixProposal { rows: vec![vec![0.0, 1.0], vec![1.0, 0.0]] });
    let t = make_mh(table(&P2), q);
    case("mh two-state flip", Arc::new(t), points_1d(2, 1, &[]), KeySpec::x_only(), x_weight(&P2), Expect::Reversible)
}

fn mh3(rule: AcceptanceRule, name: &'static str) -> Result<FiniteCase> {
    let t = make_mh(table(&P3), q3()).rule(rule);
    case(name, Arc::new(t), points_1d(3, 1, &[]), KeySpec::x_only(), x_weight(&P3), Expect::Reversible)
}

fn mixture_proposal() -> Result<FiniteCase> {
    let qf = DiscreteTag::new("q_f", 0, |z| if z.x[0] == 0.0 { vec![(0, 0.7), (1, 0.3)] } else { vec![(0, 0.4), (1, 0.6)] });
    let qr = DiscreteSlot::new("q_r", Slot::V(0), |z| {
        if z.tags[0] == 0 {
            vec![(0.0, 0.8), (1.0, 0.2)]
        } else {
            vec![(0.0, 0.3), (1.0, 0.7)]
        }
    });
    let t = make_mixture_proposal(table(&P2), Arc::new(qf), Arc::new(qr));
    case("mixture proposal", Arc::new(t), points_1d(2, 1, &[0]), KeySpec::x_only(), x_weight(&P2), Expect::Reversible)
}

fn mixture_involution() -> Result<FiniteCase> {
    let q3b = Arc::new(MatrixProposal { rows: vec![vec![0.6, 0.2, 0.2], vec![0.1, 0.1, 0.8], vec![0.5, 0.4, 0.1]] });
    let a = DiscreteTag::new("member", 0, |z| match z.x[0] as i64 {
        0 => vec![(0, 0.3), (1, 0.7)],
        1 => vec![(0, 0.5), (1, 0.5)],
        _ => vec![(0, 0.8), (1, 0.2)],
    });
    let family: Vec<Arc<dyn Involution>> =
        vec![Arc::new(Swap::new(vec![(Slot::X(0), Slot::V(0))])?), Arc::new(Swap::new(vec![(Slot::X(0), Slot::V(1))])?)];
    let t = ImcmcKernel::new("mixture involution", Arc::new(crate::OnX(table(&P3))), Arc::new(MixtureInvolution::new(0, family)?))
        .refresh(Arc::new(ProposalAux::new(q3(), Source::X, 0, 1)))
        .refresh(Arc::new(ProposalAux::new(q3b, Source::X, 1, 1)))
        .refresh(Arc::new(a))
        .layout(Layout::new(1, 2).tag("a", TagKind::Index));
    case("mixture involution", Arc::new(t), points_1d(3, 2, &[0]), KeySpec::x_only(), x_weight(&P3), Expect::Reversible)
}

fn mtm(k: usize, name: &'static str) -> Result<FiniteCase> {
    let t = make_multiple_try(table(&P3), q3(), None, k)?;
    case(name, Arc::new(t), points_1d(3, 2 * k - 1, &[0]), KeySpec::x_only(), x_weight(&P3), Expect::Reversible)
}

fn sample_adaptive(generalized: bool) -> Result<FiniteCase> {
    let rows = vec![
        vec![0.6, 0.3, 0.1],
        vec![0.3, 0.4, 0.3],
        vec![0.2, 0.5, 0.3],
        vec![0.3, 0.3, 0.4],
        vec![0.1, 0.3, 0.6],
    ];
    let g: Aggregate = if generalized {
        Arc::new(|p: &[&[f64]]| vec![p[0][0] - p[1][0] + 2.0])
    } else {
        Arc::new(|p: &[&[f64]]| vec![p[0][0] + p[1][0]])
    };
    let t = make_sample_adaptive(table(&P3), 2, Arc::new(MatrixProposal { rows }), g, generalized)?;
    let mut states = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            states.push(JointPoint::new(vec![a as f64, b as f64]).with_v(vec![0.0]).with_tags(vec![0]));
        }
    }
    let name = if generalized { "generalized sample-adaptive" } else { "sample-adaptive" };
    case(
        name,
        Arc::new(t),
        states,
        KeySpec::x_only(),
        |z| P3[z.x[0] as usize] * P3[z.x[1] as usize],
        Expect::Reversible,
    )
}

const R0: [f64; 3] = [0.2, 0.5, 0.3];
const R1: [f64; 9] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0];

/// Model 0: x in {0,1,2}, mass 0.4; model 1: x in {0,1,2}², mass 0.6.
fn finite_models() -> Result<ModelSpace> {
    let m0 = TableTarget::new_1d(R0.to_vec())?;
    let m1 = TableTarget::new(vec![3, 3], R1.to_vec())?;
    let mut s = ModelSpace::default();
    let a = s.add_model(1, move |x| 0.4f64.ln() + m0.log_density(x));
    let b = s.add_model(2, move |x| 0.6f64.ln() + m1.log_density(x));
    let uniform = |d: usize| {
        let pts: Vec<Vec<f64>> = if d == 1 {
            (0..3).map(|i| vec![i as f64]).collect()
        } else {
            (0..9).map(|i| vec![(i / 3) as f64, (i % 3) as f64]).collect()
        };
        let w = 1.0 / pts.len() as f64;
        Arc::new(TableProposal { points: pts.into_iter().map(|p| (p, w)).collect() })
    };
    s.add_within(a, uniform(1));
    s.add_within(b, uniform(2));
    let u = TableProposal { points: vec![(vec![0.0], 0.5), (vec![1.0], 0.3), (vec![2.0], 0.2)] };
    s.add_padding_pair(a, b, Arc::new(u), Arc::new(Empty))?;
    Ok(s)
}

fn model_points(tags: &[i64]) -> Vec<(JointPoint, f64)> {
    let s0: f64 = R0.iter().sum();
    let s1: f64 = R1.iter().sum();
    let mut out = Vec::new();
    for (i, r) in R0.iter().enumerate() {
        let mut t = tags.to_vec();
        t[0] = 0;
        out.push((JointPoint::new(vec![i as f64]).with_tags(t), 0.4 * r / s0));
    }
    for (i, r) in R1.iter().enumerate() {
        let mut t = tags.to_vec();
        t[0] = 1;
        out.push((JointPoint::new(vec![(i / 3) as f64, (i % 3) as f64]).with_tags(t), 0.6 * r / s1));
    }
    out
}

fn model_weight(z: &JointPoint) -> f64 {
    let s0: f64 = R0.iter().sum();
    let s1: f64 = R1.iter().sum();
    if z.tags[0] == 0 {
        0.4 * R0[z.x[0] as usize] / s0
    } else {
        0.6 * R1[3 * z.x[0] as usize + z.x[1] as usize] / s1
    }
}

fn rjmcmc() -> Result<FiniteCase> {
    let t = make_transdimensional(Arc::new(finite_models()?), JumpMode::Reversible { choice: uniform_choice(2) })?;
    let states = model_points(&[0, 0]).into_iter().map(|(p, _)| p).collect();
    case("rjmcmc", t, states, KeySpec::x_only().with_tags(vec![0]), model_weight, Expect::Reversible)
}

const NRJ_TAU: f64 = 0.5;

fn nrj() -> Result<FiniteCase> {
    let t = make_transdimensional(Arc::new(finite_models()?), JumpMode::NonReversible { tau: NRJ_TAU })?;
    let mut states = Vec::new();
    for nu in [1, -1] {
        for m in [0, 1] {
            states.extend(model_points(&[0, nu, m]).into_iter().map(|(p, _)| p));
        }
    }
    let w = |z: &JointPoint| model_weight(z) * 0.5 * if z.tags[2] == 0 { NRJ_TAU } else { 1.0 - NRJ_TAU };
    case("nrj", t, states, KeySpec::x_only().with_tags(vec![0, 1, 2]), w, Expect::Irreversible)
}

fn leapfrog5(k: usize) -> Arc<dyn FlowMap> {
    Arc::new(LatticeLeapfrog::new(5, KICK5.to_vec(), k).expect("valid lattice"))
}

fn hmc_lattice() -> ImcmcKernel {
    make_hamiltonian(table(&P5), momentum(&MOM), leapfrog5(2))
}

fn hmc_cases() -> Result<Vec<FiniteCase>> {
    let keys = KeySpec::x_only;
    let barker = hmc_lattice().rule(AcceptanceRule::Barker);
    const WIDE: [(f64, f64); 5] = [(-2.0, 0.2), (-1.0, 0.2), (0.0, 0.2), (1.0, 0.2), (2.0, 0.2)];
    let metric = DiscreteSlot::new("position-dependent momentum", Slot::V(0), |z| {
        if z.x[0] as i64 % 2 == 0 {
            MOM.to_vec()
        } else {
            WIDE.to_vec()
        }
    });
    let rm = make_hamiltonian(table(&P5), Arc::new(metric), leapfrog5(2));
    Ok(vec![
        case("hmc", Arc::new(hmc_lattice()), points_1d(5, 1, &[]), keys(), x_weight(&P5), Expect::Reversible)?,
        case("hmc barker", Arc::new(barker), points_1d(5, 1, &[]), keys(), x_weight(&P5), Expect::Reversible)?,
        case("rmhmc", Arc::new(rm), points_1d(5, 1, &[]), keys(), x_weight(&P5), Expect::Reversible)?,
    ])
}

const NEUTRA_PERM: [usize; 5] = [2, 0, 4, 1, 3];
const NEUTRA_SRC: [f64; 5] = [0.0, 0.5, -0.3, 0.2, -0.4];

fn neutra_with(to: Arc<dyn FlowMap>, target: Arc<dyn LogDensity>) -> ImcmcKernel {
    let inner = Arc::new(HamiltonianInvolution::new(leapfrog5(2)));
    make_embedded_flow(target, momentum(&MOM), to, inner)
}

fn neutra() -> Result<FiniteCase> {
    let to = Arc::new(XPermutation::new(NEUTRA_PERM.to_vec(), NEUTRA_SRC.to_vec(), vec![0.0; 5])?);
    let t = neutra_with(to, cell_density(&P5, &NEUTRA_SRC));
    case("neutra", Arc::new(t), points_1d(5, 1, &[]), KeySpec::x_only(), x_weight(&P5), Expect::Reversible)
}

fn coupling5() -> Arc<dyn FlowMap> {
    Arc::new(LatticeCoupling { nx: 5, nv: 3, a: vec![1, 2, 0], b: vec![1, 0, 2, 1, 0] })
}

fn nice() -> Result<FiniteCase> {
    let t = make_directional_map(table(&P5), momentum(&MOM3), coupling5(), true);
    case("nice-mc", Arc::new(t), points_1d(5, 1, &[1]), KeySpec::x_only(), x_weight(&P5), Expect::Reversible)
}

const L2HMC_PERM: [usize; 15] = [7, 12, 3, 14, 0, 9, 5, 11, 1, 13, 6, 2, 10, 4, 8];

fn l2hmc() -> Result<FiniteCase> {
    let map = TablePermutation::new(5, vec![0.0, 1.0, 2.0], L2HMC_PERM.to_vec(), LOGVOL5.to_vec())?;
    let t = make_directional_map(cell_density(&P5, &LOGVOL5), momentum(&MOM3), Arc::new(map), false);
    case("l2hmc", Arc::new(t), points_1d(5, 1, &[1]), KeySpec::x_only(), x_weight(&P5), Expect::Reversible)
}

const PERSISTENT_ALPHA: f64 = 0.5;
const IRR_NICE_ALPHA: f64 = 0.8;

fn persistent_lattice(alpha: f64) -> Result<Arc<dyn Transition>> {
    Ok(Arc::new(make_persistent(table(&P5), momentum(&MOM), Some(lazy_refresh(&MOM, alpha)), leapfrog5(1))?))
}

fn irr_nice_lattice(alpha: f64) -> Result<Arc<dyn Transition>> {
    Ok(Arc::new(make_persistent(table(&P5), momentum(&MOM3), Some(lazy_refresh(&MOM3, alpha)), coupling5())?))
}

fn look_ahead_lattice(k: usize) -> Result<Arc<dyn Transition>> {
    Ok(Arc::new(make_look_ahead(table(&P5), momentum(&MOM), Some(lazy_refresh(&MOM, PERSISTENT_ALPHA)), leapfrog5(1), k)?))
}

fn persistent_cases() -> Result<Vec<FiniteCase>> {
    let w = xvd_weight(&P5, &MOM);
    Ok(vec![
        case(
            "persistent hmc",
            persistent_lattice(PERSISTENT_ALPHA)?,
            points_xvd(5, &MOM),
            xvd_keys(),
            &w,
            Expect::Irreversible,
        )?,
        case(
            "irr-nice-mc",
            irr_nice_lattice(IRR_NICE_ALPHA)?,
            points_xvd(5, &MOM3),
            xvd_keys(),
            xvd_weight(&P5, &MOM3),
            Expect::Irreversible,
        )?,
        case("look-ahead", look_ahead_lattice(3)?, points_xvd(5, &MOM), xvd_keys(), &w, Expect::Irreversible)?,
    ])
}

const G4: [f64; 4] = [0.1, 0.2, 0.3, 0.4];

fn gibbs_conditionals() -> Vec<Arc<dyn AuxiliaryConditional>> {
    (0..2)
        .map(|k| {
            Arc::new(DiscreteSlot::new(format!("x{k} | rest"), Slot::V(0), move |z| {
                let cell = |a: usize| {
                    let mut x = [z.x[0] as usize, z.x[1] as usize];
                    x[k] = a;
                    G4[2 * x[0] + x[1]]
                };
                let s = cell(0) + cell(1);
                vec![(0.0, cell(0) / s), (1.0, cell(1) / s)]
            })) as Arc<dyn AuxiliaryConditional>
        })
        .collect()
}

fn gibbs_cases() -> Result<Vec<FiniteCase>> {
    let target: Arc<dyn LogDensity> = Arc::new(TableTarget::new(vec![2, 2], G4.to_vec())?);
    let grid = |tags: &[i64]| -> Vec<JointPoint> {
        (0..4)
            .map(|i| JointPoint::new(vec![(i / 2) as f64, (i % 2) as f64]).with_v(vec![0.0]).with_tags(tags.to_vec()))
            .collect()
    };
    let w = |z: &JointPoint| G4[2 * z.x[0] as usize + z.x[1] as usize];
    let mut sweep = Vec::new();
    for d in [1, -1] {
        for k in 0..2 {
            sweep.extend(grid(&[k, d]));
        }
    }
    Ok(vec![
        case(
            "random-scan gibbs",
            make_gibbs(target.clone(), gibbs_conditionals(), Scan::Random)?,
            grid(&[0]),
            KeySpec::x_only(),
            w,
            Expect::Reversible,
        )?,
        case(
            "systematic gibbs",
            make_gibbs(target.clone(), gibbs_conditionals(), Scan::Systematic)?,
            grid(&[]),
            KeySpec::x_only(),
            w,
            Expect::Irreversible,
        )?,
        case(
            "persistent gibbs",
            make_gibbs(target, gibbs_conditionals(), Scan::PersistentSystematic)?,
            sweep,
            KeySpec::x_only().with_tags(vec![0, 1]),
            w,
            Expect::Irreversible,
        )?,
    ])
}

/// MH with a uniform proposal on 0..n, written as a matrix.
pub fn uniform_mh_matrix(p: &[f64]) -> Vec<Vec<f64>> {
    let n = p.len();
    let mut t = vec![vec![0.0; n]; n];
    for x in 0..n {
        for y in 0..n {
            if y != x {
                t[x][y] = (1.0 / n as f64) * (p[y] / p[x]).min(1.0);
            }
        }
        t[x][x] = 1.0 - t[x].iter().sum::<f64>();
    }
    t
}

fn lifted() -> Result<FiniteCase> {
    let base = uniform_mh_matrix(&P3);
    let t = make_lifted(&P3, &base, &[0.0, 1.0, 2.0])?;
    case(
        "lifted mh",
        Arc::new(t),
        points_xd(3, 1),
        KeySpec::x_only().with_tags(vec![0]),
        x_weight(&P3),
        Expect::Irreversible,
    )
}

/// Bimodal smooth density restricted to 8 grid points.
pub fn bimodal_grid() -> GridTarget {
    let logp = |y: f64| ((-(y + 1.5) * (y + 1.5)).exp() + (-(y - 1.5) * (y - 1.5)).exp()).ln();
    let grad = |y: f64| {
        let (a, b) = ((-(y + 1.5) * (y + 1.5)).exp(), (-(y - 1.5) * (y - 1.5)).exp());
        (-2.0 * (y + 1.5) * a - 2.0 * (y - 1.5) * b) / (a + b)
    };
    GridTarget::new(-3.5, 1.0, 8, logp, grad)
}

const GRID_EPS: f64 = 0.5;

fn irr_mala() -> Result<FiniteCase> {
    let grid = Arc::new(bimodal_grid());
    let p = grid.pmf();
    let g = grid.clone();
    let proposal = DiscreteSlot::new("discretized drift", Slot::V(0), move |z| {
        let grad = g.gradient(&z.x).expect("grid gradient")[0];
        let mean = z.x[0] + z.tags[0] as f64 * GRID_EPS * grad;
        let w: Vec<f64> = (0..g.n).map(|j| (-(j as f64 - mean).powi(2) / (4.0 * GRID_EPS)).exp()).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().enumerate().map(|(j, a)| (j as f64, a / s)).collect()
    });
    let t = make_irr_mala_with(grid, Arc::new(proposal))?;
    case(
        "irr-mala",
        Arc::new(t),
        points_xd(8, 1),
        KeySpec::x_only().with_tags(vec![0]),
        move |z| p[z.x[0] as usize],
        Expect::Irreversible,
    )
}

fn cdf() -> Result<FiniteCase> {
    let t = CdfKernel::new(Arc::new(DiscreteUniformCdf { n: 8 }), 3.0 / 8.0);
    case("cdf", Arc::new(t), points_1d(8, 0, &[]), KeySpec::x_only(), |_| 1.0, Expect::Irreversible)
}

/// Every finite analog, one or more per builder.
pub fn finite_cases() -> Result<Vec<FiniteCase>> {
    let mut out = vec![
        mh_flip()?,
        mh3(AcceptanceRule::MetropolisMin, "mh")?,
        mh3(AcceptanceRule::Barker, "mh barker")?,
        mixture_proposal()?,
        mixture_involution()?,
        mtm(2, "mtm")?,
        sample_adaptive(false)?,
        sample_adaptive(true)?,
        rjmcmc()?,
        nrj()?,
    ];
    out.extend(hmc_cases()?);
    out.extend([neutra()?, nice()?, l2hmc()?]);
    out.extend(persistent_cases()?);
    out.extend(gibbs_cases()?);
    out.extend([lifted()?, irr_mala()?, cdf()?]);
    Ok(out)
}

/// MH with a non-symmetric proposal and no Hastings correction; the oracle
/// must reject it.
pub fn mutant_case() -> Result<FiniteCase> {
    let t = make_mh(table(&P3), Arc::new(NoHastings(q3())));
    case("mh without hastings", Arc::new(t), points_1d(3, 1, &[]), KeySpec::x_only(), x_weight(&P3), Expect::Reversible)
}

/// Two matrices that must agree.
pub struct Reduction {
    pub name: &'static str,
    pub left: TransitionMatrix,
    pub right: TransitionMatrix,
}

fn matrix_of(t: &dyn Transition, states: Vec<JointPoint>, keys: KeySpec) -> Result<TransitionMatrix> {
    transition_matrix(t, &StateSpace::new(states, keys)?)
}

/// Rows of a (x, v, d) matrix lumped onto x and averaged over (v, d) with
/// weights m(v)/2.
fn averaged_x_rows(t: &TransitionMatrix, states: &[JointPoint], pmf: &[(f64, f64)], n: usize) -> TransitionMatrix {
    let group: Vec<usize> = states.iter().map(|z| z.x[0] as usize).collect();
    let l = lump(t, &group, n);
    let mut out = TransitionMatrix::zeros(n, n);
    for (i, z) in states.iter().enumerate() {
        let w = 0.5 * pmf_of(pmf, z.v[0]);
        for j in 0..n {
            out.data[group[i] * n + j] += w * l.get(i, j);
        }
    }
    out
}

/// Matrix whose row for state i is row group[i] of `m`.
fn expand_rows(m: &TransitionMatrix, group: &[usize]) -> TransitionMatrix {
    let rows: Vec<Vec<f64>> = group.iter().map(|&g| m.row(g).to_vec()).collect();
    TransitionMatrix::from_rows(&rows)
}

/// Exact special-case identities between builders.
pub fn reductions() -> Result<Vec<Reduction>> {
    let x5 = || points_1d(5, 1, &[]);
    let x5d = || points_1d(5, 1, &[1]);
    let mut out = Vec::new();

    let m1 = make_multiple_try(table(&P3), q3(), None, 1)?;
    out.push(Reduction {
        name: "mtm k=1 equals mh",
        left: matrix_of(&m1, points_1d(3, 1, &[0]), KeySpec::x_only())?,
        right: matrix_of(&make_mh(table(&P3), q3()), points_1d(3, 1, &[]), KeySpec::x_only())?,
    });

    let la = look_ahead_lattice(1)?;
    let ph = persistent_lattice(PERSISTENT_ALPHA)?;
    out.push(Reduction {
        name: "look-ahead K=1 equals persistent hmc",
        left: matrix_of(la.as_ref(), points_xvd(5, &MOM), xvd_keys())?,
        right: matrix_of(ph.as_ref(), points_xvd(5, &MOM), xvd_keys())?,
    });

    let hmc = matrix_of(&hmc_lattice(), x5(), KeySpec::x_only())?;
    out.push(Reduction {
        name: "neutra with identity equals hmc",
        left: matrix_of(&neutra_with(Arc::new(Identity), table(&P5)), x5(), KeySpec::x_only())?,
        right: hmc.clone(),
    });

    let dir = make_directional_map(table(&P5), momentum(&MOM), leapfrog5(2), true);
    out.push(Reduction {
        name: "directional leapfrog equals hmc",
        left: matrix_of(&dir, x5d(), KeySpec::x_only())?,
        right: hmc,
    });

    let base = uniform_mh_matrix(&P3);
    let flat = make_lifted(&P3, &base, &[1.0; 3])?;
    let mut block = vec![vec![0.0; 6]; 6];
    for x in 0..3 {
        for y in 0..3 {
            block[x][y] = base[x][y];
            block[3 + x][3 + y] = base[x][y];
        }
    }
    out.push(Reduction {
        name: "lifted with constant eta equals base",
        left: matrix_of(&flat, points_xd(3, 1), KeySpec::x_only().with_tags(vec![0]))?,
        right: TransitionMatrix::from_rows(&block),
    });

    let states = points_xvd(5, &MOM);
    let group: Vec<usize> = states.iter().map(|z| z.x[0] as usize).collect();
    let full = matrix_of(persistent_lattice(1.0)?.as_ref(), states.clone(), xvd_keys())?;
    let hmc1 = matrix_of(&make_hamiltonian(table(&P5), momentum(&MOM), leapfrog5(1)), x5(), KeySpec::x_only())?;
    out.push(Reduction {
        name: "persistent hmc alpha=1 equals hmc",
        left: lump(&full, &group, 5),
        right: expand_rows(&hmc1, &group),
    });

    let states = points_xvd(5, &MOM3);
    let irr = matrix_of(irr_nice_lattice(1.0)?.as_ref(), states.clone(), xvd_keys())?;
    let nice = make_directional_map(table(&P5), momentum(&MOM3), coupling5(), true);
    out.push(Reduction {
        name: "irr-nice-mc alpha=1 equals nice-mc after averaging over d",
        left: averaged_x_rows(&irr, &states, &MOM3, 5),
        right: matrix_of(&nice, x5d(), KeySpec::x_only())?,
    });
    Ok(out)
}

/// A named involution with the points it is checked on.
pub struct InvolutionCase {
    pub name: &'static str,
    pub map: Arc<dyn Involution>,
    pub points: Vec<JointPoint>,
}

/// Points per involution case.
pub const INVOLUTION_POINTS: usize = 100;

fn normals(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| {
        let e: f64 = StandardNormal.sample(rng);
        scale * e
    }).collect()
}

fn sample_points(
    seed: u64,
    f: impl Fn(&mut ChaCha8Rng) -> JointPoint,
) -> Vec<JointPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..INVOLUTION_POINTS).map(|_| f(&mut rng)).collect()
}

fn direction(rng: &mut ChaCha8Rng) -> i64 {
    if rng.random::<bool>() {
        1
    } else {
        -1
    }
}

/// Every shipped involution on random points.
pub fn involution_cases(seed: u64) -> Result<Vec<InvolutionCase>> {
    let mog: Arc<dyn LogDensity> = Arc::new(Mog2::default());
    let std2: Arc<dyn LogDensity> = Arc::new(StdNormal::new(2));
    let xv = |d: usize, nv: usize| move |r: &mut ChaCha8Rng| JointPoint::new(normals(r, d, 2.0)).with_v(normals(r, nv, 1.0));
    let xvd = |d: usize| {
        move |r: &mut ChaCha8Rng| {
            let t = direction(r);
            JointPoint::new(normals(r, d, 2.0)).with_v(normals(r, d, 1.0)).with_tags(vec![t])
        }
    };
    let cfg = LeapfrogConfig::new(0.1, 5)?;
    let metric = Arc::new(FnMetric::new(
        1,
        |x| DMatrix::from_element(1, 1, 1.0 + x[0] * x[0]),
        |x| vec![DMatrix::from_element(1, 1, 2.0 * x[0])],
    ));
    let affine = AffineMap::new(vec![0.5, -1.0], vec![2.0, 0.7])?;
    let pullback: Arc<dyn LogDensity> = Arc::new(AffinePullback { target: mog.clone(), map: affine.clone() });
    let neutra = Embed::new(
        Arc::new(Inverse(Arc::new(affine.clone()))),
        Arc::new(HamiltonianInvolution::new(Arc::new(Leapfrog::new(pullback, cfg)))),
    );

    let mut out = vec![
        InvolutionCase { name: "swap", map: Arc::new(Swap::x_v(2, 0)), points: sample_points(seed, xv(2, 2)) },
        InvolutionCase { name: "momentum flip", map: Arc::new(NegateV { start: 0, len: 2 }), points: sample_points(seed + 1, xv(2, 2)) },
        InvolutionCase { name: "direction flip", map: Arc::new(FlipTag(0)), points: sample_points(seed + 2, xvd(2)) },
        InvolutionCase {
            name: "hmc standard normal",
            map: Arc::new(HamiltonianInvolution::new(Arc::new(Leapfrog::new(std2, cfg)))),
            points: sample_points(seed + 3, xv(2, 2)),
        },
        InvolutionCase {
            name: "hmc mog2",
            map: Arc::new(HamiltonianInvolution::new(Arc::new(Leapfrog::new(mog.clone(), cfg)))),
            points: sample_points(seed + 4, xv(2, 2)),
        },
        InvolutionCase {
            name: "implicit leapfrog",
            map: Arc::new(HamiltonianInvolution::new(Arc::new(ImplicitLeapfrog::new(
                Arc::new(StdNormal::new(1)),
                metric,
                cfg,
            )))),
            points: sample_points(seed + 5, |r| JointPoint::new(normals(r, 1, 1.0)).with_v(normals(r, 1, 1.0))),
        },
        InvolutionCase {
            name: "coupling with direction",
            map: Arc::new(DirectionAugment::new(Arc::new(CouplingMap::jump_leapfrog(mog.clone(), 4.0, 1.0, 0.25, 4)), 0)),
            points: sample_points(seed + 6, xvd(2)),
        },
        InvolutionCase {
            name: "affine coupling with direction",
            map: Arc::new(DirectionAugment::new(
                Arc::new(CouplingMap::jump_leapfrog_affine(mog.clone(), 4.0, 1.0, 0.25, 4, 0.1)),
                0,
            )),
            points: sample_points(seed + 7, xvd(2)),
        },
        InvolutionCase { name: "neutra", map: Arc::new(neutra), points: sample_points(seed + 8, xv(2, 2)) },
        InvolutionCase {
            name: "embedded swap",
            map: Arc::new(Embed::new(Arc::new(affine), Arc::new(Swap::x_v(2, 0)))),
            points: sample_points(seed + 9, xv(2, 2)),
        },
        InvolutionCase { name: "irr-mala", map: Arc::new(IrrMalaMap::new(mog, 0)), points: sample_points(seed + 10, xvd(2)) },
        InvolutionCase {
            name: "mixture of swaps",
            map: Arc::new(MixtureInvolution::new(
                0,
                vec![Arc::new(Swap::x_v(2, 0)), Arc::new(Swap::x_v(2, 2)), Arc::new(NegateV { start: 0, len: 4 })],
            )?),
            points: sample_points(seed + 11, |r| {
                let a = r.random_range(0..3);
                JointPoint::new(normals(r, 2, 2.0)).with_v(normals(r, 4, 1.0)).with_tags(vec![a])
            }),
        },
        InvolutionCase {
            name: "multiple-try swap",
            map: Arc::new(TrialSwap { k: 3, d: 2 }),
            points: sample_points(seed + 12, |r| {
                let j = r.random_range(0..3);
                JointPoint::new(normals(r, 2, 2.0)).with_v(normals(r, 10, 1.0)).with_tags(vec![j])
            }),
        },
        InvolutionCase {
            name: "sample-adaptive swap",
            map: Arc::new(ElementSwap { n: 3, d: 2 }),
            points: sample_points(seed + 13, |r| {
                let j = r.random_range(0..=3);
                JointPoint::new(normals(r, 6, 2.0)).with_v(normals(r, 2, 1.0)).with_tags(vec![j])
            }),
        },
        InvolutionCase {
            name: "gibbs sweep",
            map: Arc::new(SweepMove { n: 3 }),
            points: sample_points(seed + 14, |r| {
                let k = r.random_range(0..3);
                let d = direction(r);
                JointPoint::new(normals(r, 3, 2.0)).with_v(normals(r, 1, 1.0)).with_tags(vec![k, d])
            }),
        },
    ];
    out.sort_by_key(|c| c.name);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{check_detailed_balance, check_stationary, product_matrix};

    #[test]
    fn every_analog_is_stationary() {
        for c in finite_cases().unwrap() {
            let t = c.matrix().unwrap();
            assert!(t.row_sum_error() < 1e-12, "{}: rows sum to {}", c.name, t.row_sum_error());
            let s = check_stationary(&t, &c.weights, 1e-12);
            assert!(s.pass, "{}: stationarity error {:e}", c.name, s.value);
        }
    }

    #[test]
    fn reversibility_matches_expectation() {
        for c in finite_cases().unwrap() {
            let b = check_detailed_balance(&c.matrix().unwrap(), &c.weights, 1e-12);
            match c.expect {
                Expect::Reversible => assert!(b.pass, "{}: balance error {:e}", c.name, b.value),
                Expect::Irreversible => assert!(b.value > 1e-6, "{}: balance error only {:e}", c.name, b.value),
            }
        }
    }

    #[test]
    fn compositions_match_product_of_parts() {
        for c in finite_cases().unwrap() {
            if c.transition.components().is_empty() {
                continue;
            }
            let direct = c.matrix().unwrap();
            let prod = product_matrix(c.transition.as_ref(), &c.space).unwrap();
            assert!(direct.max_abs_diff(&prod) < 1e-14, "{}: {:e}", c.name, direct.max_abs_diff(&prod));
        }
    }

    #[test]
    fn mutant_is_caught() {
        let c = mutant_case().unwrap();
        let s = check_stationary(&c.matrix().unwrap(), &c.weights, 1e-12);
        assert!(!s.pass && s.value > 1e-3, "{:e}", s.value);
    }

    #[test]
    fn reductions_hold() {
        for r in reductions().unwrap() {
            let d = r.left.max_abs_diff(&r.right);
            assert!(d < 1e-12, "{}: {:e}", r.name, d);
        }
    }

    #[test]
    fn involutions_are_self_inverse() {
        for c in involution_cases(7).unwrap() {
            let r = crate::verify::verify_involution(c.map.as_ref(), &c.points, 1e-8).unwrap();
            assert!(r.max_displacement <= 1e-10, "{}: {:e}", c.name, r.max_displacement);
            assert!(r.max_logdet_asymmetry <= 1e-8, "{}: {:e}", c.name, r.max_logdet_asymmetry);
        }
    }

    #[test]
    fn lifted_builder_matches_direct_matrix() {
        let base = uniform_mh_matrix(&P3);
        let eta = [0.0, 1.0, 2.0];
        let t = make_lifted(&P3, &base, &eta).unwrap();
        let m = matrix_of(&t, points_xd(3, 1), KeySpec::x_only().with_tags(vec![0])).unwrap();
        let direct = TransitionMatrix::from_rows(&crate::samplers::lifted_matrix(&base, &eta).unwrap());
        assert!(m.max_abs_diff(&direct) < 1e-14);
    }
}
