//! Parallel transport of `dR/dt = A(t) R`, `R(0) = I` on `[0, 1]` by the
//! iterated-integral series `R(1) = sum_k int_{t_1 > ... > t_k} A(t_1)...A(t_k)`,
//! with a fourth-order Runge-Kutta integrator as an independent check, and
//! the holonomy of a flat connection perturbed by a piecewise-constant 1-form.
//!
//! Each term is produced by applying the integral operator
//! `T(phi)(t) = int_0^t A(s) phi(s) ds` with the composite trapezoid rule, so
//! order `n` costs `n` sweeps over the grid. By default the sweeps run on the
//! grid and on its every-other-node subgrid and are combined as
//! `(4 fine - coarse) / 3`, which cancels the `h^2` error term.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::liealg::AlgebraElement;
use crate::linalg::{self, CMat};
use crate::surface::{Letter, Representation, Word};

type Sampler = Arc<dyn Fn(f64) -> CMat + Send + Sync>;

#[derive(Clone)]
struct Segment {
    duration: f64,
    /// `A` on this segment is `scale * sampler(s)` at local time `s` in `[0, 1]`;
    /// `sampler` is in the time units of the path it was built for.
    scale: f64,
    sampler: Sampler,
}

/// A matrix-valued function on `[0, 1]`, smooth on each of finitely many
/// consecutive segments. Values at segment ends are one-sided limits, so jumps
/// between segments are resolved exactly by the grid.
#[derive(Clone)]
pub struct MatrixPath {
    dim: usize,
    segments: Vec<Segment>,
}

impl std::fmt::Debug for MatrixPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MatrixPath")
            .field("dim", &self.dim)
            .field("segments", &self.segments.len())
            .finish()
    }
}

impl MatrixPath {
    pub fn from_fn(dim: usize, f: impl Fn(f64) -> CMat + Send + Sync + 'static) -> Self {
        MatrixPath {
            dim,
            segments: vec![Segment {
                duration: 1.0,
                scale: 1.0,
                sampler: Arc::new(f),
            }],
        }
    }

    pub fn constant(a: CMat) -> Self {
        let dim = a.nrows();
        MatrixPath::from_fn(dim, move |_| a.clone())
    }

    /// Constant value `values[i].1` on a segment of length `values[i].0`; the
    /// lengths must sum to 1.
    pub fn piecewise_constant(values: Vec<(f64, CMat)>) -> Result<Self> {
        let dim = values
            .first()
            .map(|(_, a)| a.nrows())
            .ok_or_else(|| Error::ShapeMismatch("empty piecewise path".into()))?;
        let total: f64 = values.iter().map(|(d, _)| d).sum();
        if (total - 1.0).abs() > 1e-12 || values.iter().any(|(d, a)| *d <= 0.0 || a.shape() != (dim, dim)) {
            return Err(Error::ShapeMismatch("segments must be square and cover [0, 1]".into()));
        }
        let segments = values
            .into_iter()
            .map(|(duration, a)| Segment {
                duration,
                scale: 1.0,
                sampler: Arc::new(move |_| a.clone()),
            })
            .collect();
        Ok(MatrixPath { dim, segments })
    }

    /// `self` on `[0, 1/2]` followed by `other` on `[1/2, 1]`.
    pub fn concat(&self, other: &MatrixPath) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        fn half(p: &MatrixPath) -> impl Iterator<Item = Segment> + '_ {
            p.segments.iter().map(|s| Segment {
                duration: s.duration / 2.0,
                scale: s.scale * 2.0,
                sampler: s.sampler.clone(),
            })
        }
        Ok(MatrixPath {
            dim: self.dim,
            segments: half(self).chain(half(other)).collect(),
        })
    }

    /// `t -> scale * A(t)`.
    pub fn scaled(&self, scale: f64) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                scale: s.scale * scale,
                ..s.clone()
            })
            .collect();
        MatrixPath { dim: self.dim, segments }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `A(t)`, taking the right limit at segment boundaries.
    pub fn eval(&self, t: f64) -> CMat {
        let mut start = 0.0;
        for (i, seg) in self.segments.iter().enumerate() {
            let end = start + seg.duration;
            if t < end || i + 1 == self.segments.len() {
                let s = ((t - start) / seg.duration).clamp(0.0, 1.0);
                return (seg.sampler)(s) * linalg::c(seg.scale);
            }
            start = end;
        }
        CMat::zeros(self.dim, self.dim)
    }

    /// Samples on a grid of about `n` cells, each segment getting a whole
    /// number of them.
    pub fn grid(&self, n: usize) -> Result<Grid> {
        if n < 2 {
            return Err(Error::ShapeMismatch("grid needs at least 2 cells".into()));
        }
        let mut cells = Vec::new();
        for seg in &self.segments {
            // An even count per segment keeps every other node a subgrid.
            let k = 2 * ((n as f64 * seg.duration / 2.0).round() as usize).max(1);
            let h = seg.duration / k as f64;
            let factor = linalg::c(seg.scale);
            let sample = |s: f64| -> Result<CMat> {
                let a = (seg.sampler)(s) * factor;
                if a.shape() != (self.dim, self.dim) {
                    return Err(Error::ShapeMismatch("path sample has wrong size".into()));
                }
                if !linalg::is_finite(&a) {
                    return Err(Error::NonFinite("path sample"));
                }
                Ok(a)
            };
            let mut left = sample(0.0)?;
            for j in 0..k {
                let right = sample((j + 1) as f64 / k as f64)?;
                let mid = sample((j as f64 + 0.5) / k as f64)?;
                cells.push(Cell {
                    h,
                    a0: left,
                    amid: mid,
                    a1: right.clone(),
                });
                left = right;
            }
        }
        Ok(Grid { dim: self.dim, cells })
    }
}

#[derive(Clone, Debug)]
struct Cell {
    h: f64,
    /// `A` at the left end (right limit).
    a0: CMat,
    amid: CMat,
    /// `A` at the right end (left limit).
    a1: CMat,
}

/// Cached samples of a [`MatrixPath`].
#[derive(Clone, Debug)]
pub struct Grid {
    dim: usize,
    cells: Vec<Cell>,
}

impl Grid {
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// `int_0^1 ||A(s)|| ds` (operator norm), by Simpson's rule on each cell.
    pub fn norm_integral(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| c.h / 6.0 * (linalg::op_norm(&c.a0) + 4.0 * linalg::op_norm(&c.amid) + linalg::op_norm(&c.a1)))
            .sum()
    }

    /// The grid with every other node dropped (cells merged in pairs).
    fn coarsen(&self) -> Grid {
        let cells = self
            .cells
            .chunks(2)
            .map(|pair| Cell {
                h: pair[0].h + pair[1].h,
                a0: pair[0].a0.clone(),
                amid: pair[0].a1.clone(),
                a1: pair[1].a1.clone(),
            })
            .collect();
        Grid { dim: self.dim, cells }
    }

    /// `T(phi)` at every node, by the cumulative trapezoid rule with
    /// compensated summation.
    fn apply_operator(&self, phi: &[CMat]) -> Vec<CMat> {
        let mut out = Vec::with_capacity(phi.len());
        let mut acc = CMat::zeros(self.dim, self.dim);
        let mut lost = CMat::zeros(self.dim, self.dim);
        out.push(acc.clone());
        for (i, c) in self.cells.iter().enumerate() {
            let y = (&c.a0 * &phi[i] + &c.a1 * &phi[i + 1]) * linalg::c(c.h / 2.0) - &lost;
            let t = &acc + &y;
            lost = (&t - &acc) - y;
            acc = t;
            out.push(acc.clone());
        }
        out
    }
}

/// Truncated iterated-integral series at `t = 1`.
#[derive(Clone, Debug)]
pub struct TransportSeries {
    /// `terms[k]` is the `k`-fold iterated integral.
    pub terms: Vec<CMat>,
    pub order: usize,
    /// `int_0^1 ||A||`.
    pub r: f64,
    /// `sum_{k > order} r^k / k!`.
    pub remainder: f64,
}

impl TransportSeries {
    pub fn sum(&self) -> CMat {
        let mut s = CMat::zeros(self.terms[0].nrows(), self.terms[0].ncols());
        for t in &self.terms {
            s += t;
        }
        s
    }
}

/// `sum_{k > order} r^k / k!`, summed term by term.
pub fn exp_tail(r: f64, order: usize) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    for k in 1..=order {
        term *= r / k as f64;
    }
    let mut tail = 0.0;
    let mut k = order + 1;
    loop {
        term *= r / k as f64;
        tail += term;
        if term <= tail * 1e-17 || !term.is_finite() {
            return tail;
        }
        k += 1;
    }
}

/// Quadrature used for the iterated integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Quadrature {
    /// Composite trapezoid rule, error `O(h^2)`.
    Trapezoid,
    /// Trapezoid on the grid and its subgrid, extrapolated to `O(h^4)`.
    #[default]
    Richardson,
}

/// Iterated-integral series up to `order` on a grid of about `n` cells.
pub fn picard_transport(path: &MatrixPath, order: usize, n: usize) -> Result<TransportSeries> {
    picard_transport_with(path, order, n, Quadrature::default())
}

pub fn picard_transport_with(path: &MatrixPath, order: usize, n: usize, quadrature: Quadrature) -> Result<TransportSeries> {
    let grid = path.grid(n)?;
    Ok(picard_on_grid(&grid, order, quadrature))
}

fn trapezoid_terms(grid: &Grid, order: usize) -> Vec<CMat> {
    let id = linalg::identity(grid.dim);
    let mut phi = vec![id.clone(); grid.cells.len() + 1];
    let mut terms = vec![id];
    for _ in 0..order {
        phi = grid.apply_operator(&phi);
        terms.push(phi.last().expect("nonempty grid").clone());
    }
    terms
}

pub fn picard_on_grid(grid: &Grid, order: usize, quadrature: Quadrature) -> TransportSeries {
    let fine = trapezoid_terms(grid, order);
    let terms = match quadrature {
        Quadrature::Trapezoid => fine,
        Quadrature::Richardson => {
            let coarse = trapezoid_terms(&grid.coarsen(), order);
            fine.iter()
                .zip(&coarse)
                .map(|(f, c)| (f * linalg::c(4.0) - c) / linalg::c(3.0))
                .collect()
        }
    };
    let r = grid.norm_integral();
    TransportSeries {
        terms,
        order,
        r,
        remainder: exp_tail(r, order),
    }
}

pub fn remainder_bound(series: &TransportSeries) -> f64 {
    series.remainder
}

/// How far the partial-sum flow `S_n` is from being a fixed point of
/// `phi -> I + T(phi)`, measured at `t = 1` in operator norm.
pub fn fixed_point_defect(path: &MatrixPath, order: usize, n: usize) -> Result<f64> {
    let grid = path.grid(n)?;
    let id = linalg::identity(grid.dim);
    let mut phi = vec![id.clone(); grid.cells.len() + 1];
    let mut partial = phi.clone();
    for _ in 0..order {
        phi = grid.apply_operator(&phi);
        for (s, p) in partial.iter_mut().zip(&phi) {
            *s += p;
        }
    }
    let image = grid.apply_operator(&partial);
    let last = partial.len() - 1;
    Ok(linalg::op_norm(&(&id + &image[last] - &partial[last])))
}

/// Classical RK4 for `dR/dt = A(t) R`, `R(0) = I`.
pub fn rk4_transport(path: &MatrixPath, n: usize) -> Result<CMat> {
    let grid = path.grid(n)?;
    Ok(rk4_on_grid(&grid, linalg::identity(grid.dim)))
}

fn rk4_on_grid(grid: &Grid, start: CMat) -> CMat {
    let mut r = start;
    for c in &grid.cells {
        let h = linalg::c(c.h);
        let half = linalg::c(c.h / 2.0);
        let k1 = &c.a0 * &r;
        let k2 = &c.amid * (&r + &k1 * half);
        let k3 = &c.amid * (&r + &k2 * half);
        let k4 = &c.a1 * (&r + &k3 * h);
        r += (k1 + (k2 + k3) * linalg::c(2.0) + k4) * linalg::c(c.h / 6.0);
        if !linalg::is_finite(&r) {
            break;
        }
    }
    r
}

/// A smooth random path `A(t) = X_0 + cos(2 pi t) X_1 + t^2 X_2` with real
/// Gaussian `X_i`, rescaled so that `int ||A|| = r`.
pub fn random_path(dim: usize, r: f64, seed: u64) -> MatrixPath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian = || {
        let v: Vec<f64> = (0..dim * dim).map(|_| rng.sample(StandardNormal)).collect();
        linalg::from_real(dim, dim, &v)
    };
    let (x0, x1, x2) = (gaussian(), gaussian(), gaussian());
    let raw = MatrixPath::from_fn(dim, move |t| {
        &x0 + &x1 * linalg::c((2.0 * std::f64::consts::PI * t).cos()) + &x2 * linalg::c(t * t)
    });
    let norm = raw.grid(4000).map(|g| g.norm_integral()).unwrap_or(1.0);
    raw.scaled(r / norm)
}

/// Which sign the connection form enters the transport equation with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TransportSign {
    /// `A = -theta(gamma')`, from the covariant-constancy equation.
    #[default]
    Negative,
    /// `A = +theta(gamma')`, matching the integral equation as printed.
    Positive,
}

impl TransportSign {
    fn factor(self) -> f64 {
        match self {
            TransportSign::Negative => -1.0,
            TransportSign::Positive => 1.0,
        }
    }
}

/// A 1-form on the surface that is constant along the arc of each generator.
/// The matrix stored for a generator is the integral of the form over that
/// arc, traversed in the positive direction just before the crossing.
#[derive(Clone, Debug)]
pub struct Perturbation {
    dim: usize,
    values: Vec<CMat>,
}

impl Perturbation {
    pub fn zero(dim: usize, num_generators: usize) -> Self {
        Perturbation {
            dim,
            values: vec![CMat::zeros(dim, dim); num_generators],
        }
    }

    pub fn new(dim: usize, num_generators: usize, entries: Vec<(Letter, AlgebraElement)>) -> Result<Self> {
        let mut p = Perturbation::zero(dim, num_generators);
        for (l, x) in entries {
            if l.is_inverse() || l.generator() > num_generators || x.matrix().shape() != (dim, dim) {
                return Err(Error::ShapeMismatch(format!("perturbation entry {}", l.name())));
            }
            p.values[l.generator() - 1] = x.into_matrix();
        }
        Ok(p)
    }

    /// Independent random elements of the Lie algebra at the given scale.
    pub fn random(basis: &crate::liealg::AlgebraBasis, num_generators: usize, scale: f64, rng: &mut impl Rng) -> Self {
        Perturbation {
            dim: basis.spec().n(),
            values: (0..num_generators).map(|_| basis.random(rng, scale).into_matrix()).collect(),
        }
    }

    pub fn value(&self, l: Letter) -> &CMat {
        &self.values[l.generator() - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(|z| *z == linalg::ZERO))
    }

    /// Simultaneous conjugation `x -> h^-1 x h`.
    pub fn conjugate(&self, h: &CMat, h_inv: &CMat) -> Self {
        Perturbation {
            dim: self.dim,
            values: self.values.iter().map(|v| h_inv * v * h).collect(),
        }
    }
}

/// Per-letter pieces of the perturbed transport along `w`: the flat holonomy
/// accumulated before the letter's arc, the connection form on the arc, and
/// the holonomy after it.
struct Arc1 {
    gauge: CMat,
    form: CMat,
    jump_first: bool,
    letter: Letter,
}

fn arcs(rho: &Representation, w: &Word, theta: &Perturbation, sign: TransportSign) -> Result<Vec<Arc1>> {
    let n = rho.spec().n();
    if theta.dim != n || theta.values.len() != rho.presentation().num_generators() {
        return Err(Error::ShapeMismatch("perturbation does not match representation".into()));
    }
    let m = w.len() as f64;
    let mut hol = linalg::identity(n);
    let mut out = Vec::with_capacity(w.len());
    for &l in w.letters() {
        let next = rho.image(l) * &hol;
        let form = theta.value(l) * linalg::c(sign.factor() * m);
        if l.is_inverse() {
            out.push(Arc1 {
                gauge: next.clone(),
                form: -form,
                jump_first: true,
                letter: l,
            });
        } else {
            out.push(Arc1 {
                gauge: hol.clone(),
                form,
                jump_first: false,
                letter: l,
            });
        }
        hol = next;
    }
    Ok(out)
}

/// The transported integrand `H(t)^-1 A(t) H(t)` of the perturbation along
/// the loop `w`, where `H` is the flat holonomy so far. Each letter occupies
/// an interval of length `1/|w|`.
pub fn perturbation_path(rho: &Representation, w: &Word, theta: &Perturbation, sign: TransportSign) -> Result<MatrixPath> {
    let n = rho.spec().n();
    if w.is_empty() {
        return Ok(MatrixPath::constant(CMat::zeros(n, n)));
    }
    let m = w.len() as f64;
    let mut pieces = Vec::with_capacity(w.len());
    for arc in arcs(rho, w, theta, sign)? {
        let inv = linalg::inverse(&arc.gauge, "flat holonomy")?;
        pieces.push((1.0 / m, inv * &arc.form * &arc.gauge));
    }
    MatrixPath::piecewise_constant(pieces)
}

/// Holonomy of the perturbed connection along `w` together with the series
/// of the transported integrand.
#[derive(Clone, Debug)]
pub struct PerturbedHolonomy {
    pub flat: CMat,
    pub series: TransportSeries,
    /// `flat * series.sum()`.
    pub matrix: CMat,
}

impl PerturbedHolonomy {
    /// Degree-0 Wilson loop value `Re tr`.
    pub fn trace(&self) -> f64 {
        linalg::re_trace(&self.matrix)
    }
}

/// `hol(w) * S` with `S` the iterated-integral series of the transported
/// perturbation.
pub fn perturbed_holonomy(
    rho: &Representation,
    w: &Word,
    theta: &Perturbation,
    order: usize,
    n: usize,
    sign: TransportSign,
) -> Result<PerturbedHolonomy> {
    let flat = rho.holonomy(w).into_matrix();
    let path = perturbation_path(rho, w, theta, sign)?;
    let series = picard_transport(&path, order, n)?;
    let matrix = &flat * series.sum();
    Ok(PerturbedHolonomy { flat, series, matrix })
}

/// The same holonomy by RK4 on the untransported equation, applying each
/// generator's jump at its crossing.
pub fn perturbed_holonomy_rk4(
    rho: &Representation,
    w: &Word,
    theta: &Perturbation,
    n: usize,
    sign: TransportSign,
) -> Result<CMat> {
    let dim = rho.spec().n();
    let mut r = linalg::identity(dim);
    if w.is_empty() {
        return Ok(r);
    }
    let cells = ((n as f64 / w.len() as f64).round() as usize).max(2);
    for arc in arcs(rho, w, theta, sign)? {
        let jump = rho.image(arc.letter);
        if arc.jump_first {
            r = jump * r;
        }
        // The form is given per unit of total time; the arc lasts 1/|w|.
        let local = MatrixPath::constant(&arc.form / linalg::c(w.len() as f64)).grid(cells)?;
        r = rk4_on_grid(&local, r);
        if !arc.jump_first {
            r = jump * r;
        }
    }
    Ok(r)
}

/// Bilinear action `Ad_h u = h^-1 u h`.
pub fn adjoint(h: &CMat, u: &CMat) -> Result<CMat> {
    Ok(linalg::inverse(h, "adjoint")? * u * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{AlgebraBasis, GroupElement, GroupSpec};
    use crate::linalg::{from_real, from_real_diag};
    use crate::surface::{SurfacePresentation, WordKind};

    fn nil_upper() -> CMat {
        from_real(2, 2, &[0.0, 1.0, 0.0, 0.0])
    }

    fn nil_lower() -> CMat {
        from_real(2, 2, &[0.0, 0.0, 1.0, 0.0])
    }

    #[test]
    fn picard_examples() {
        let s = picard_transport(&MatrixPath::constant(nil_upper()), 3, 10).unwrap();
        assert!((s.sum() - from_real(2, 2, &[1.0, 1.0, 0.0, 1.0])).norm() < 1e-15);

        let p = MatrixPath::from_fn(2, |t| from_real(2, 2, &[0.0, 2.0 * t, 0.0, 0.0]));
        let s = picard_transport(&p, 3, 1000).unwrap();
        assert!((s.sum() - from_real(2, 2, &[1.0, 1.0, 0.0, 1.0])).norm() < 1e-12);

        // Later times act on the left: e^{Y/2} e^{X/2}.
        let p = MatrixPath::piecewise_constant(vec![(0.5, nil_upper()), (0.5, nil_lower())]).unwrap();
        let expect = from_real(2, 2, &[1.0, 0.5, 0.5, 1.25]);
        let s = picard_transport(&p, 12, 2000).unwrap();
        assert!((s.sum() - &expect).norm() < 1e-12, "{}", s.sum());
        assert!((rk4_transport(&p, 2000).unwrap() - &expect).norm() < 1e-12);
    }

    #[test]
    fn rk4_examples() {
        let zero = MatrixPath::constant(CMat::zeros(2, 2));
        assert_eq!(rk4_transport(&zero, 10).unwrap(), linalg::identity(2));
        let d = MatrixPath::constant(from_real_diag(&[1.0, -1.0]));
        let r = rk4_transport(&d, 1000).unwrap();
        let e = std::f64::consts::E;
        assert!((r - from_real_diag(&[e, 1.0 / e])).norm() < 1e-10);
    }

    #[test]
    fn remainder_examples() {
        assert_eq!(exp_tail(0.0, 5), 0.0);
        assert!((exp_tail(1.0, 0) - (std::f64::consts::E - 1.0)).abs() < 1e-15);
        assert!(exp_tail(1.0, 12) <= 1e-9);
        let bound = |r: f64, n: usize| r.exp() * r.powi(n as i32 + 1) / (1..=n + 1).map(|k| k as f64).product::<f64>();
        for (r, n) in [(0.5, 3), (2.0, 12), (3.0, 1)] {
            assert!(exp_tail(r, n) <= bound(r, n));
        }
    }

    #[test]
    fn picard_matches_rk4_and_decays() {
        for seed in 0..5 {
            let p = random_path(3, 0.5 + 0.3 * seed as f64, seed);
            let s = picard_transport(&p, 12, 2000).unwrap();
            assert!((s.r - (0.5 + 0.3 * seed as f64)).abs() < 1e-6);
            let exact = rk4_transport(&p, 2000).unwrap();
            let err = linalg::op_norm(&(s.sum() - exact));
            assert!(err <= s.remainder + 1e-6, "seed {seed}: {err:e}");
            for (k, t) in s.terms.iter().enumerate() {
                let bound = s.r.powi(k as i32) / (1..=k).map(|j| j as f64).product::<f64>();
                assert!(linalg::op_norm(t) <= bound * (1.0 + 1e-6));
            }
            assert!(fixed_point_defect(&p, 12, 2000).unwrap() <= s.remainder + 1e-12);
        }
    }

    #[test]
    fn trapezoid_error_is_second_order() {
        let p = random_path(2, 1.5, 7);
        let exact = rk4_transport(&p, 4000).unwrap();
        let err = |n| {
            let s = picard_transport_with(&p, 20, n, Quadrature::Trapezoid).unwrap();
            linalg::op_norm(&(s.sum() - &exact))
        };
        let ratio = err(200) / err(400);
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
        let s = picard_transport(&p, 20, 400).unwrap();
        assert!(linalg::op_norm(&(s.sum() - &exact)) < err(400) / 100.0);
    }

    #[test]
    fn concatenation_multiplies_on_the_left() {
        let p1 = random_path(2, 1.0, 1);
        let p2 = random_path(2, 0.7, 2);
        let t1 = picard_transport(&p1, 12, 1000).unwrap();
        let t2 = picard_transport(&p2, 12, 1000).unwrap();
        let t12 = picard_transport(&p1.concat(&p2).unwrap(), 12, 2000).unwrap();
        assert!((t12.sum() - t2.sum() * t1.sum()).norm() < 1e-12);
        for n in 0..=4 {
            let mut expect = CMat::zeros(2, 2);
            for i in 0..=n {
                expect += &t2.terms[n - i] * &t1.terms[i];
            }
            assert!((&t12.terms[n] - expect).norm() < 1e-13);
        }
    }

    fn diag_torus() -> Representation {
        let spec = GroupSpec::gl_r(2);
        let a = GroupElement::new(spec, from_real_diag(&[2.0, 0.5])).unwrap();
        let b = GroupElement::new(spec, from_real_diag(&[3.0, 1.0 / 3.0])).unwrap();
        Representation::new(spec, SurfacePresentation::new(1).unwrap(), vec![a, b]).unwrap()
    }

    #[test]
    fn perturbed_holonomy_examples() {
        let rho = diag_torus();
        let w = Word::parse("a1 B1 a1", WordKind::Cyclic).unwrap();
        let zero = Perturbation::zero(2, 2);
        let ph = perturbed_holonomy(&rho, &w, &zero, 10, 200, TransportSign::Negative).unwrap();
        assert_eq!(&ph.matrix, rho.holonomy(&w).matrix());

        let trivial = Representation::trivial(GroupSpec::gl_r(2), SurfacePresentation::new(1).unwrap());
        let x = AlgebraElement::new(GroupSpec::gl_r(2), from_real(2, 2, &[0.1, 0.3, -0.2, 0.05])).unwrap();
        let theta = Perturbation::new(2, 2, vec![(Letter::a(1), x.clone())]).unwrap();
        let a = Word::parse("a1", WordKind::Cyclic).unwrap();
        let ph = perturbed_holonomy(&trivial, &a, &theta, 12, 2000, TransportSign::Negative).unwrap();
        let direct = perturbed_holonomy_rk4(&trivial, &a, &theta, 2000, TransportSign::Negative).unwrap();
        assert!((&ph.matrix - &direct).norm() < 1e-8);
        assert!((&ph.matrix - linalg::expm(&-x.matrix())).norm() < 1e-8);

        let basis = AlgebraBasis::new(GroupSpec::gl_r(2));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let theta = Perturbation::random(&basis, 2, 0.1, &mut rng);
        for sign in [TransportSign::Negative, TransportSign::Positive] {
            let ph = perturbed_holonomy(&rho, &w, &theta, 10, 2000, sign).unwrap();
            let direct = perturbed_holonomy_rk4(&rho, &w, &theta, 2000, sign).unwrap();
            assert!((&ph.matrix - &direct).norm() < 1e-6 * (1.0 + direct.norm()));
        }
    }
}
