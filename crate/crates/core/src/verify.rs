//! Seeded batteries of numerical checks.
//!
//! Every suite is a list of independent trials. A trial is a pure function of
//! the suite, the configuration and its index, so trials can run in any order
//! or in parallel and still print the same report.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use crate::chen::{
    self, fixed_point_defect, perturbed_holonomy, perturbed_holonomy_rk4, picard_transport, random_path,
    rk4_transport, Perturbation, TransportSign,
};
use crate::dgla;
use crate::error::{Error, Result};
use crate::goldman::{self, BracketKind, LoopSum};
use crate::io::num;
use crate::liealg::{
    self, directional_derivative_fd, pairing, variation, variation_by_projection, variation_hat, AlgebraBasis,
    AlgebraElement, EnvelopingWord, GroupElement, GroupSpec,
};
use crate::linalg::{self, CMat};
use crate::surface::{
    homotopy_moves, random_cyclic_word, sample_representation, sample_representation_reseeding, Representation,
    SampleMode, SurfacePresentation, Word, WordKind,
};
use crate::tolerance::{DEFAULT_GRID, DEFAULT_ORDER, FD_STEP, TAU_FD, TAU_NUM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    GoldmanGl,
    GoldmanUnoriented,
    Jacobi,
    Chen,
    Dgla,
    Variation,
    Torus,
    Independence,
    Perturbed,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::GoldmanGl,
        Suite::GoldmanUnoriented,
        Suite::Jacobi,
        Suite::Chen,
        Suite::Dgla,
        Suite::Variation,
        Suite::Torus,
        Suite::Independence,
        Suite::Perturbed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::GoldmanGl => "goldman-gl",
            Suite::GoldmanUnoriented => "goldman-unoriented",
            Suite::Jacobi => "jacobi",
            Suite::Chen => "chen",
            Suite::Dgla => "dgla",
            Suite::Variation => "variation",
            Suite::Torus => "torus",
            Suite::Independence => "independence",
            Suite::Perturbed => "perturbed",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::GoldmanGl | Suite::GoldmanUnoriented => 50,
            Suite::Jacobi => 30,
            Suite::Chen | Suite::Perturbed => 20,
            Suite::Dgla => 12,
            Suite::Variation => 100,
            Suite::Torus => 10,
            Suite::Independence => 10,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Config {
    pub seed: u64,
    pub trials: Option<usize>,
    pub genus: Option<usize>,
    pub group: Option<GroupSpec>,
    /// Replaces every upper bound when set.
    pub tol: Option<f64>,
}

impl Config {
    pub fn new(seed: u64) -> Self {
        Config {
            seed,
            ..Config::default()
        }
    }

    pub fn trials(&self, suite: Suite) -> usize {
        self.trials.unwrap_or(suite.default_trials())
    }

    fn bound(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    /// `value <= bound` when true, `value >= bound` otherwise.
    pub upper: bool,
    /// Informational checks are reported but do not decide the trial.
    pub gating: bool,
}

impl Check {
    pub fn passes(&self) -> bool {
        if self.upper {
            self.value <= self.bound
        } else {
            self.value >= self.bound
        }
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), self.name.into());
        m.insert("value".into(), num(self.value));
        m.insert("op".into(), if self.upper { "<=" } else { ">=" }.into());
        m.insert("bound".into(), num(self.bound));
        m.insert("pass".into(), self.passes().into());
        if !self.gating {
            m.insert("informational".into(), true.into());
        }
        Value::Object(m)
    }
}

#[derive(Clone, Debug)]
pub struct TrialReport {
    pub suite: Suite,
    pub trial: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub info: Map<String, Value>,
    pub error: Option<String>,
}

impl TrialReport {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| !c.gating || c.passes())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("suite".into(), self.suite.name().into());
        m.insert("trial".into(), self.trial.into());
        m.insert("seed".into(), self.seed.into());
        m.insert("pass".into(), self.pass().into());
        m.insert("checks".into(), self.checks.iter().map(Check::to_json).collect());
        if !self.info.is_empty() {
            m.insert("info".into(), Value::Object(self.info.clone()));
        }
        if let Some(e) = &self.error {
            m.insert("error".into(), e.clone().into());
        }
        Value::Object(m)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: Vec<TrialReport>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.trials.iter().all(TrialReport::pass)
    }

    /// Largest value of each named check over all trials (smallest for
    /// lower bounds).
    pub fn worst(&self) -> Vec<Check> {
        let mut out: Vec<Check> = Vec::new();
        for c in self.trials.iter().flat_map(|t| &t.checks) {
            match out.iter_mut().find(|o| o.name == c.name) {
                Some(o) => {
                    let worse = if c.upper { c.value > o.value } else { c.value < o.value };
                    if worse || c.value.is_nan() {
                        *o = c.clone();
                    }
                }
                None => out.push(c.clone()),
            }
        }
        out
    }

    pub fn summary_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("suite".into(), self.suite.name().into());
        m.insert("summary".into(), true.into());
        m.insert("trials".into(), self.trials.len().into());
        m.insert("passed".into(), self.trials.iter().filter(|t| t.pass()).count().into());
        m.insert("pass".into(), self.pass().into());
        m.insert("worst".into(), self.worst().iter().map(Check::to_json).collect());
        Value::Object(m)
    }

    /// JSON lines: one per trial in index order, then the summary.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for t in &self.trials {
            out.push_str(&t.to_json().to_string());
            out.push('\n');
        }
        out.push_str(&self.summary_json().to_string());
        out.push('\n');
        out
    }
}

pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(trial as u64)
}

pub fn run_suite(suite: Suite, cfg: &Config) -> SuiteReport {
    let trials = (0..cfg.trials(suite)).map(|i| run_trial(suite, cfg, i)).collect();
    SuiteReport { suite, trials }
}

/// Collects trials computed elsewhere (e.g. in parallel) into index order.
pub fn assemble(suite: Suite, mut trials: Vec<TrialReport>) -> SuiteReport {
    trials.sort_by_key(|t| t.trial);
    SuiteReport { suite, trials }
}

pub fn run_trial(suite: Suite, cfg: &Config, trial: usize) -> TrialReport {
    let seed = trial_seed(cfg.seed, trial);
    let mut t = TrialReport {
        suite,
        trial,
        seed,
        checks: Vec::new(),
        info: Map::new(),
        error: None,
    };
    let outcome = match suite {
        Suite::GoldmanGl => goldman_trial(&mut t, cfg, BracketKind::Oriented),
        Suite::GoldmanUnoriented => goldman_trial(&mut t, cfg, BracketKind::Unoriented),
        Suite::Jacobi => jacobi_trial(&mut t, cfg),
        Suite::Chen => chen_trial(&mut t, cfg),
        Suite::Dgla => dgla_trial(&mut t, cfg),
        Suite::Variation => variation_trial(&mut t, cfg),
        Suite::Torus => torus_trial(&mut t, cfg),
        Suite::Independence => independence_trial(&mut t, cfg),
        Suite::Perturbed => perturbed_trial(&mut t, cfg),
    };
    if let Err(e) = outcome {
        t.error = Some(e.to_string());
    }
    t
}

impl TrialReport {
    fn le(&mut self, name: &'static str, value: f64, bound: f64) {
        self.checks.push(Check {
            name,
            value,
            bound,
            upper: true,
            gating: true,
        });
    }

    fn ge(&mut self, name: &'static str, value: f64, bound: f64) {
        self.checks.push(Check {
            name,
            value,
            bound,
            upper: false,
            gating: true,
        });
    }

    fn note(&mut self, key: &str, v: impl Into<Value>) {
        self.info.insert(key.into(), v.into());
    }
}

fn relative(diff: f64, scale: f64) -> f64 {
    diff.abs() / (1.0 + scale.abs())
}

fn sample(spec: &GroupSpec, genus: usize, seed: u64) -> Result<Representation> {
    let pres = SurfacePresentation::new(genus)?;
    sample_representation_reseeding(spec, &pres, seed, 8)
}

fn goldman_trial(t: &mut TrialReport, cfg: &Config, kind: BracketKind) -> Result<()> {
    let groups = match kind {
        BracketKind::Oriented => vec![GroupSpec::gl_r(2), GroupSpec::gl_c(2)],
        BracketKind::Unoriented => vec![GroupSpec::o(2), GroupSpec::o_pq(1, 1), GroupSpec::u(2), GroupSpec::sp_r(2)],
    };
    let genus = cfg.genus.unwrap_or(1 + t.trial % 2);
    let spec = cfg.group.unwrap_or(groups[(t.trial / 2) % groups.len()]);
    t.note("genus", genus);
    t.note("group", spec.to_string());
    t.note("sampling", if genus >= 2 { "newton" } else { "commuting" });
    let rho = sample(&spec, genus, t.seed)?;
    let pres = *rho.presentation();
    let mut rng = ChaCha8Rng::seed_from_u64(t.seed);
    let g = random_cyclic_word(&pres, 6, &mut rng);
    let l = random_cyclic_word(&pres, 6, &mut rng);
    t.note("gamma", g.to_string());
    t.note("lambda", l.to_string());
    let b = goldman::bracket(kind, &g, &l, &pres, t.seed)?;
    let value = goldman::evaluate(&b, &rho);
    let direct = goldman::poisson_direct(&g, &l, &rho, t.seed)?;
    t.note("bracket_terms", b.len());
    t.note("value", num(value));
    t.le("homomorphism", relative(value - direct, direct), cfg.bound(1e-8));
    Ok(())
}

fn jacobi_trial(t: &mut TrialReport, cfg: &Config) -> Result<()> {
    let genus = cfg.genus.unwrap_or(1 + t.trial % 2);
    let oriented = [GroupSpec::gl_r(2), GroupSpec::gl_c(2)];
    let unoriented = [GroupSpec::o(2), GroupSpec::o_pq(1, 1), GroupSpec::u(2), GroupSpec::sp_r(2)];
    let pres = SurfacePresentation::new(genus)?;
    let mut rng = ChaCha8Rng::seed_from_u64(t.seed);
    let words: Vec<Word> = (0..3).map(|_| random_cyclic_word(&pres, 4, &mut rng)).collect();
    t.note("genus", genus);
    t.note("curves", words.iter().map(|w| Value::from(w.to_string())).collect::<Vec<_>>());
    let (g, l, m) = (&words[0], &words[1], &words[2]);
    for kind in [BracketKind::Oriented, BracketKind::Unoriented] {
        let (spec, names) = match kind {
            BracketKind::Oriented => (
                cfg.group.unwrap_or(oriented[(t.trial / 2) % oriented.len()]),
                ("group_oriented", "antisymmetry_oriented", "jacobi_oriented"),
            ),
            BracketKind::Unoriented => (
                cfg.group.unwrap_or(unoriented[(t.trial / 2) % unoriented.len()]),
                ("group_unoriented", "antisymmetry_unoriented", "jacobi_unoriented"),
            ),
        };
        t.note(names.0, spec.to_string());
        let rho = sample(&spec, genus, t.seed)?;

        let forward = goldman::evaluate(&goldman::bracket(kind, g, l, &pres, t.seed)?, &rho);
        let backward = goldman::evaluate(&goldman::bracket(kind, l, g, &pres, t.seed.wrapping_add(1))?, &rho);
        t.le(names.1, (forward + backward).abs(), cfg.bound(1e-8));

        let mut total = 0.0;
        for (x, y, z) in [(g, l, m), (l, m, g), (m, g, l)] {
            let inner: LoopSum = goldman::bracket(kind, y, z, &pres, t.seed)?;
            let v = goldman::evaluate_bracket_with(kind, x, &inner, &rho, t.seed.wrapping_add(1))?;
            total += v;
        }
        t.le(names.2, total.abs(), cfg.bound(1e-8));
    }
    Ok(())
}

fn operator_norms(terms: &[CMat]) -> Vec<f64> {
    terms.iter().map(linalg::op_norm).collect()
}

/// Terms of the perturbed-holonomy series of `w` up to `order`.
fn wilson_terms(rho: &Representation, w: &Word, theta: &Perturbation, order: usize) -> Result<Vec<CMat>> {
    Ok(perturbed_holonomy(rho, w, theta, order, DEFAULT_GRID, TransportSign::default())?.series.terms)
}

fn chen_trial(t: &mut TrialReport, cfg: &Config) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(t.seed);
    let dim = 2 + t.trial % 2;
    let r = 0.25 + 1.75 * rng.random::<f64>();
    let order = DEFAULT_ORDER;
    let n = DEFAULT_GRID;
    t.note("dim", dim);
    t.note("R", num(r));
    let path = random_path(dim, r, t.seed);
    let series = picard_transport(&path, order, n)?;
    let exact = rk4_transport(&path, n)?;
    let err = linalg::op_norm(&(series.sum() - &exact));
    t.note("picard_minus_rk4", num(err));
    t.note("remainder_bound", num(series.remainder));
    t.le("convergence_excess", err - series.remainder, cfg.bound(1e-7));

    let norms = operator_norms(&series.terms);
    let mut factorial = 1.0_f64;
    let mut bound_excess = f64::NEG_INFINITY;
    let mut ratio_excess = f64::NEG_INFINITY;
    for k in 0..norms.len() {
        if k > 0 {
            factorial *= k as f64;
        }
        let bound = series.r.powi(k as i32) / factorial;
        bound_excess = bound_excess.max(norms[k] / bound - 1.0);
        if k + 1 < norms.len() && norms[k] > 0.0 {
            ratio_excess = ratio_excess.max(norms[k + 1] / norms[k] - series.r / (k + 1) as f64);
        }
    }
    t.le("factorial_bound_excess", bound_excess, cfg.bound(1e-6));
    // Consecutive terms need not shrink by R/(k+1); reported for reference.
    t.checks.push(Check {
        name: "term_ratio_excess",
        value: ratio_excess,
        bound: cfg.bound(1e-6),
        upper: true,
        gating: false,
    });
    t.le(
        "fixed_point_excess",
        fixed_point_defect(&path, order, n)? - series.remainder,
        cfg.bound(1e-10),
    );

    // Transport along a concatenation is the product, term by term.
    let other = random_path(dim, 0.5 + rng.random::<f64>(), t.seed ^ 0x5555);
    let s1 = picard_transport(&path, 4, n / 2)?;
    let s2 = picard_transport(&other, 4, n / 2)?;
    let s12 = picard_transport(&path.concat(&other)?, 4, n)?;
    let mut concat = 0.0_f64;
    for k in 0..=4 {
        let mut expect = CMat::zeros(dim, dim);
        for i in 0..=k {
            expect += &s2.terms[k - i] * &s1.terms[i];
        }
        concat = concat.max((&s12.terms[k] - expect).norm());
    }
    t.le("concatenation", concat, cfg.bound(1e-7));

    // The same identity for perturbed holonomies of words.
    let genus = cfg.genus.unwrap_or(1 + t.trial % 2);
    let spec = cfg.group.unwrap_or(GroupSpec::gl_r(2));
    let rho = sample(&spec, genus, t.seed)?;
    let pres = *rho.presentation();
    let basis = AlgebraBasis::new(spec);
    let theta = Perturbation::random(&basis, pres.num_generators(), 0.3, &mut rng);
    let g1 = random_cyclic_word(&pres, 3, &mut rng).with_kind(WordKind::Based);
    let g2 = random_cyclic_word(&pres, 3, &mut rng).with_kind(WordKind::Based);
    t.note("gamma1", g1.to_string());
    t.note("gamma2", g2.to_string());
    let v1 = wilson_terms(&rho, &g1, &theta, 4)?;
    let v2 = wilson_terms(&rho, &g2, &theta, 4)?;
    let v12 = wilson_terms(&rho, &g1.concat(&g2), &theta, 4)?;
    let h1 = rho.holonomy(&g1).into_matrix();
    let mut lemma = 0.0_f64;
    for k in 0..=4 {
        let mut expect = CMat::zeros(spec.n(), spec.n());
        for i in 0..=k {
            expect += chen::adjoint(&h1, &v2[k - i])? * &v1[i];
        }
        lemma = lemma.max(relative((&v12[k] - &expect).norm(), expect.norm()));
    }
    t.le("word_multiplicativity", lemma, cfg.bound(1e-7));

    if t.trial == 0 {
        let nil = linalg::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let s = picard_transport(&chen::MatrixPath::constant(nil.clone()), order, n)?;
        let d = (s.sum() - (linalg::identity(2) + nil)).norm();
        t.le("nilpotent_exact", d, cfg.bound(1e-15));
    }
    Ok(())
}

const DGLA_INSTANCES: [(usize, fn() -> GroupSpec); 6] = [
    (1, || GroupSpec::gl_r(1)),
    (2, || GroupSpec::gl_r(1)),
    (1, || GroupSpec::gl_r(2)),
    (2, || GroupSpec::gl_r(2)),
    (2, || GroupSpec::o(3)),
    (1, || GroupSpec::u(2)),
];

fn dgla_trial(t: &mut TrialReport, cfg: &Config) -> Result<()> {
    let (g0, spec0) = DGLA_INSTANCES[t.trial % DGLA_INSTANCES.len()];
    let genus = cfg.genus.unwrap_or(g0);
    let spec = cfg.group.unwrap_or_else(spec0);
    t.note("genus", genus);
    t.note("group", spec.to_string());
    let plain = dgla::surface_toy_instance(genus, &spec)?;
    let twisted = dgla::twisted_toy_instance(genus, &spec, t.seed)?;
    let (d0, d1) = plain.dims();
    t.note("d0", d0);
    t.note("d1", d1);

    let mut axioms = 0.0_f64;
    let mut nondegeneracy = f64::INFINITY;
    for l in [&plain, &twisted] {
        let r = l.axioms_residual();
        axioms = axioms.max(r.max_residual());
        nondegeneracy = nondegeneracy.min(r.nondegeneracy);
    }
    t.le("axioms", axioms, cfg.bound(1e-12));
    t.ge("nondegeneracy", nondegeneracy, 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(t.seed);
    let (mut fd, mut hom, mut inv) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..5 {
        let x = twisted.random_odd(&mut rng, 1.0);
        let v = twisted.random_odd(&mut rng, 1.0);
        let u = twisted.random_odd(&mut rng, 1.0);
        let a = twisted.random_even(&mut rng, 1.0);
        let b = twisted.random_even(&mut rng, 1.0);
        fd = fd.max(dgla::moment_fd_residual(&twisted, &x, &a, &v, FD_STEP));
        hom = hom.max(dgla::homomorphism_residual(&twisted, &a, &b, &x));
        inv = inv.max(dgla::invariance_residual(&twisted, &a, &u, &v));
    }
    t.le("moment_map", fd, cfg.bound(TAU_FD));
    t.le("homomorphism", hom, cfg.bound(1e-10));
    t.le("omega_invariance", inv, cfg.bound(TAU_NUM));

    let mut tangency = 0.0_f64;
    let mut mc = 0.0_f64;
    for l in [&plain, &twisted] {
        let start = l.random_odd(&mut rng, 1e-2);
        let x: DVector<f64> = l.find_mc_point(&start, 50, 1e-14)?;
        mc = mc.max(l.mc_residual(&x).amax());
        let a = l.random_even(&mut rng, 1.0);
        tangency = tangency.max(dgla::tangency_residual(l, &x, &a));
        // The moment map vanishes on the Maurer-Cartan set.
        mc = mc.max(l.moment(&x, &a).abs());
    }
    t.le("mc_residual", mc, cfg.bound(1e-12));
    t.le("tangency", tangency, cfg.bound(1e-8));
    Ok(())
}

fn variation_specs() -> Vec<GroupSpec> {
    vec![
        GroupSpec::gl_r(3),
        GroupSpec::gl_c(3),
        GroupSpec::o_pq(1, 2),
        GroupSpec::o_c(3),
        GroupSpec::u_pq(2, 1),
        GroupSpec::sp_r(4),
        GroupSpec::sp_pq(1, 1),
    ]
}

/// `<F(g exp(s x1) exp(t x2)), y>`.
fn paired_variation(g: &GroupElement, steps: &[(&AlgebraElement, f64)], y: &AlgebraElement) -> Result<f64> {
    let mut m = g.matrix().clone();
    for (x, s) in steps {
        m *= linalg::expm(&(x.matrix() * linalg::c(*s)));
    }
    let moved = GroupElement::new(*g.spec(), m)?;
    pairing(&variation(&moved)?, y)
}

fn variation_trial(t: &mut TrialReport, cfg: &Config) -> Result<()> {
    let specs = cfg.group.map_or_else(variation_specs, |s| vec![s]);
    let mut rng = ChaCha8Rng::seed_from_u64(t.seed);
    let (mut fd, mut closed, mut env1, mut env2) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for spec in &specs {
        let basis = AlgebraBasis::new(*spec);
        let g = liealg::random_element_with(&basis, &mut rng, liealg::RANDOM_SCALE);
        let x1 = basis.random(&mut rng, 1.0);
        let x2 = basis.random(&mut rng, 1.0);
        let y = basis.random(&mut rng, 1.0);

        let exact = pairing(&variation(&g)?, &x1)?;
        fd = fd.max((directional_derivative_fd(&g, &x1, FD_STEP) - exact).abs());
        closed = closed.max((variation(&g)?.matrix() - variation_by_projection(&basis, &g).matrix()).norm());

        let h = FD_STEP;
        let k1 = pairing(&variation_hat(&g, &EnvelopingWord::new(vec![x1.clone()]))?, &y)?;
        let d1 = (paired_variation(&g, &[(&x1, h)], &y)? - paired_variation(&g, &[(&x1, -h)], &y)?) / (2.0 * h);
        env1 = env1.max((k1 - d1).abs());

        let k2 = pairing(&variation_hat(&g, &EnvelopingWord::new(vec![x1.clone(), x2.clone()]))?, &y)?;
        let corner = |s: f64, u: f64| paired_variation(&g, &[(&x1, s), (&x2, u)], &y);
        let mixed = |h: f64| -> Result<f64> {
            Ok((corner(h, h)? - corner(h, -h)? - corner(-h, h)? + corner(-h, -h)?) / (4.0 * h * h))
        };
        // Step halving cancels the O(h^2) term of the mixed difference.
        let h = 1e-3;
        let d2 = (4.0 * mixed(h / 2.0)? - mixed(h)?) / 3.0;
        env2 = env2.max((k2 - d2).abs());
    }
    t.note("groups", specs.iter().map(|s| Value::from(s.to_string())).collect::<Vec<_>>());
    t.le("gradient_fd", fd, cfg.bound(TAU_FD));
    t.le("closed_vs_projection", closed, cfg.bound(1e-9));
    t.le("enveloping_k1", env1, cfg.bound(1e-4));
    t.le("enveloping_k2", env2, cfg.bound(1e-4));
    Ok(())
}

fn torus_trial(t: &mut TrialReport, cfg: &Config) -> Result<()> {
    let spec = cfg
        .group
        .unwrap_or(if t.trial.is_multiple_of(2) { GroupSpec::gl_r(2) } else { GroupSpec::gl_c(2) });
    t.note("group", spec.to_string());
    let pres = SurfacePresentation::new(1)?;
    let rho = sample_representation(&spec, &pres, t.seed, SampleMode::Random)?;
    let mut worst = 0.0_f64;
    let mut pairs = 0usize;
    for p in -3..=3i64 {
        for q in -3..=3i64 {
            for r in -3..=3i64 {
                for s in -3..=3i64 {
                    let (g, l) = (goldman::torus_word(p, q), goldman::torus_word(r, s));
                    let lhs = if g.is_empty() || l.is_empty() {
                        0.0
                    } else {
                        goldman::evaluate(&goldman::bracket_oriented(&g, &l, &pres, t.seed)?, &rho)
                    };
                    let rhs = (p * s - q * r) as f64 * rho.trace_function(&goldman::torus_word(p + r, q + s));
                    worst = worst.max(relative(lhs - rhs, rhs));
                    pairs += 1;
                }
            }
        }
    }
    t.note("pairs", pairs);
    t.le("closed_form", worst, cfg.bound(1e-8));
    Ok(())
}

fn independence_trial(t: &mut TrialReport, cfg: &Config) -> Result<()> {
    let genus = cfg.genus.unwrap_or(2);
    let spec = cfg.group.unwrap_or(GroupSpec::gl_c(2));
    t.note("genus", genus);
    t.note("group", spec.to_string());
    let rho = sample(&spec, genus, t.seed)?;
    let pres = *rho.presentation();
    let kind = BracketKind::for_group(spec.kind());
    let mut rng = ChaCha8Rng::seed_from_u64(t.seed);
    let g = random_cyclic_word(&pres, 5, &mut rng);
    let l = random_cyclic_word(&pres, 5, &mut rng);
    t.note("gamma", g.to_string());
    t.note("lambda", l.to_string());
    let reference = goldman::evaluate(&goldman::bracket(kind, &g, &l, &pres, t.seed)?, &rho);
    let mut worst = 0.0_f64;
    for k in 0..20u64 {
        let g2 = homotopy_moves(&g, &pres, t.seed.wrapping_add(2 * k), 3);
        let l2 = homotopy_moves(&l, &pres, t.seed.wrapping_add(2 * k + 1), 3);
        for s in 0..5u64 {
            let seed = t.seed.wrapping_add(100 * k + s);
            let v = goldman::evaluate(&goldman::bracket(kind, &g2, &l2, &pres, seed)?, &rho);
            worst = worst.max(relative(v - reference, reference));
        }
    }
    t.le("representative_independence", worst, cfg.bound(1e-8));
    Ok(())
}

fn perturbed_trial(t: &mut TrialReport, cfg: &Config) -> Result<()> {
    let groups = [GroupSpec::gl_r(2), GroupSpec::gl_c(2), GroupSpec::u(2), GroupSpec::sp_r(2)];
    let genus = cfg.genus.unwrap_or(1 + t.trial % 2);
    let spec = cfg.group.unwrap_or(groups[(t.trial / 2) % groups.len()]);
    t.note("genus", genus);
    t.note("group", spec.to_string());
    let rho = sample(&spec, genus, t.seed)?;
    let pres = *rho.presentation();
    let mut rng = ChaCha8Rng::seed_from_u64(t.seed);
    let basis = AlgebraBasis::new(spec);
    let theta = Perturbation::random(&basis, pres.num_generators(), 0.1, &mut rng);
    let w = random_cyclic_word(&pres, 6, &mut rng);
    t.note("word", w.to_string());
    let sign = TransportSign::default();

    let ph = perturbed_holonomy(&rho, &w, &theta, DEFAULT_ORDER, DEFAULT_GRID, sign)?;
    let direct = perturbed_holonomy_rk4(&rho, &w, &theta, DEFAULT_GRID, sign)?;
    t.note("trace", num(ph.trace()));
    t.note("remainder_bound", num(ph.series.remainder));
    t.le("series_vs_rk4", relative((&ph.matrix - &direct).norm(), direct.norm()), cfg.bound(1e-6));

    let zero = Perturbation::zero(spec.n(), pres.num_generators());
    let flat = perturbed_holonomy(&rho, &w, &zero, DEFAULT_ORDER, DEFAULT_GRID, sign)?;
    t.le("zero_perturbation", (&flat.matrix - rho.holonomy(&w).matrix()).norm(), cfg.bound(0.0));

    let h = liealg::random_element_with(&basis, &mut rng, liealg::RANDOM_SCALE);
    let h_inv = h.inverse()?;
    let moved = perturbed_holonomy(
        &rho.conjugate(&h)?,
        &w,
        &theta.conjugate(h.matrix(), h_inv.matrix()),
        DEFAULT_ORDER,
        DEFAULT_GRID,
        sign,
    )?;
    t.le("gauge_invariance", relative(moved.trace() - ph.trace(), ph.trace()), cfg.bound(TAU_NUM));
    Ok(())
}
