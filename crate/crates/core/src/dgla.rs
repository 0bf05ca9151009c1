//! Finite-dimensional cyclic differential graded Lie algebras.
//!
//! Vectors are coefficient vectors in a fixed basis whose first `d0` entries
//! span the even part `L_0` and whose last `d1` entries span the odd part
//! `L_1`. The bracket is stored as structure constants `[e_i, e_j] = sum_k
//! c_ijk e_k`, the differential and the pairing as matrices.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{pairing_raw, AlgebraBasis, GroupSpec};
use crate::linalg;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDgla", into = "RawDgla")]
pub struct CyclicDgla {
    d0: usize,
    d1: usize,
    /// `d e_j = sum_i differential[(i, j)] e_i`.
    differential: DMatrix<f64>,
    /// `c_ijk` at `(i * dim + j) * dim + k`.
    bracket: Vec<f64>,
    /// `omega(e_i, e_j)`.
    pairing: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDgla {
    d0: usize,
    d1: usize,
    differential: Vec<Vec<f64>>,
    bracket: Vec<Vec<Vec<f64>>>,
    pairing: Vec<Vec<f64>>,
}

fn rows_to_matrix(rows: &[Vec<f64>], dim: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::ShapeMismatch(format!("{what} must be {dim}x{dim}")));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

impl TryFrom<RawDgla> for CyclicDgla {
    type Error = Error;

    fn try_from(raw: RawDgla) -> Result<Self> {
        let dim = raw.d0 + raw.d1;
        let differential = rows_to_matrix(&raw.differential, dim, "differential")?;
        let pairing = rows_to_matrix(&raw.pairing, dim, "pairing")?;
        if raw.bracket.len() != dim || raw.bracket.iter().any(|m| m.len() != dim || m.iter().any(|r| r.len() != dim)) {
            return Err(Error::ShapeMismatch(format!("bracket must be {dim}x{dim}x{dim}")));
        }
        let bracket: Vec<f64> = raw.bracket.into_iter().flatten().flatten().collect();
        CyclicDgla::new(raw.d0, raw.d1, differential, bracket, pairing)
    }
}

impl From<CyclicDgla> for RawDgla {
    fn from(l: CyclicDgla) -> Self {
        let dim = l.dim();
        let rows = |m: &DMatrix<f64>| (0..dim).map(|i| m.row(i).iter().copied().collect()).collect();
        RawDgla {
            d0: l.d0,
            d1: l.d1,
            differential: rows(&l.differential),
            bracket: (0..dim)
                .map(|i| (0..dim).map(|j| l.bracket[(i * dim + j) * dim..(i * dim + j + 1) * dim].to_vec()).collect())
                .collect(),
            pairing: rows(&l.pairing),
        }
    }
}

/// Largest residual of each defining condition over all basis elements.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    /// `d` maps `L_0` to `L_1` and `L_1` to `L_0`.
    pub parity: f64,
    /// `d[x,y] = [dx,y] + (-1)^|x| [x,dy]`.
    pub leibniz: f64,
    /// `omega([x,y],z) = omega(x,[y,z])`.
    pub cyclicity: f64,
    /// `omega(dx,y) + (-1)^|x| omega(x,dy) = 0`.
    pub compatibility: f64,
    /// `omega(y,x) = (-1)^{|x||y|} omega(x,y)`.
    pub symmetry: f64,
    /// Smallest singular value of `omega` on `L_0` and on `L_1`, relative to
    /// the largest. Nondegenerate when positive.
    pub nondegeneracy: f64,
    /// `omega(L_0, L_1) = 0`.
    pub mixed_pairing: f64,
    pub d_squared: f64,
    /// The bracket respects the grading.
    pub bracket_parity: f64,
    /// `[x,y] = -(-1)^{|x||y|} [y,x]`.
    pub antisymmetry: f64,
    /// `[x,[y,z]] = [[x,y],z] + (-1)^{|x||y|} [y,[x,z]]`.
    pub jacobi: f64,
}

impl AxiomReport {
    /// Largest residual, excluding nondegeneracy.
    pub fn max_residual(&self) -> f64 {
        [
            self.parity,
            self.leibniz,
            self.cyclicity,
            self.compatibility,
            self.symmetry,
            self.mixed_pairing,
            self.d_squared,
            self.bracket_parity,
            self.antisymmetry,
            self.jacobi,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol && self.nondegeneracy > tol
    }
}

impl CyclicDgla {
    pub fn new(d0: usize, d1: usize, differential: DMatrix<f64>, bracket: Vec<f64>, pairing: DMatrix<f64>) -> Result<Self> {
        let dim = d0 + d1;
        if differential.shape() != (dim, dim) || pairing.shape() != (dim, dim) || bracket.len() != dim * dim * dim {
            return Err(Error::ShapeMismatch(format!("tensors do not match dimension {dim}")));
        }
        if differential.iter().chain(&bracket).chain(pairing.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("structure tensors"));
        }
        Ok(CyclicDgla {
            d0,
            d1,
            differential,
            bracket,
            pairing,
        })
    }

    /// Zero bracket and differential; `omega` is the identity on `L_0` and the
    /// standard symplectic form on `L_1` (`d1` must be even).
    pub fn abelian(d0: usize, d1: usize) -> Result<Self> {
        if !d1.is_multiple_of(2) {
            return Err(Error::ShapeMismatch("odd part needs even dimension".into()));
        }
        let dim = d0 + d1;
        let mut pairing = DMatrix::zeros(dim, dim);
        for i in 0..d0 {
            pairing[(i, i)] = 1.0;
        }
        for k in 0..d1 / 2 {
            let (i, j) = (d0 + 2 * k, d0 + 2 * k + 1);
            pairing[(i, j)] = 1.0;
            pairing[(j, i)] = -1.0;
        }
        CyclicDgla::new(d0, d1, DMatrix::zeros(dim, dim), vec![0.0; dim * dim * dim], pairing)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d0, self.d1)
    }

    pub fn dim(&self) -> usize {
        self.d0 + self.d1
    }

    pub fn parity(&self, i: usize) -> usize {
        usize::from(i >= self.d0)
    }

    pub fn differential(&self) -> &DMatrix<f64> {
        &self.differential
    }

    pub fn pairing_matrix(&self) -> &DMatrix<f64> {
        &self.pairing
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        let dim = self.dim();
        self.bracket[(i * dim + j) * dim + k]
    }

    pub fn set_structure_constant(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let dim = self.dim();
        self.bracket[(i * dim + j) * dim + k] = value;
    }

    /// Embeds coefficients of an even vector.
    pub fn even(&self, coeffs: &[f64]) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v.rows_mut(0, self.d0).copy_from_slice(coeffs);
        v
    }

    /// Embeds coefficients of an odd vector.
    pub fn odd(&self, coeffs: &[f64]) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v.rows_mut(self.d0, self.d1).copy_from_slice(coeffs);
        v
    }

    pub fn basis_vector(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v[i] = 1.0;
        v
    }

    pub fn d(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.differential * x
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let dim = self.dim();
        let mut out = DVector::zeros(dim);
        for i in 0..dim {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..dim {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let c = &self.bracket[(i * dim + j) * dim..(i * dim + j + 1) * dim];
                for (o, &ck) in out.iter_mut().zip(c) {
                    *o += w * ck;
                }
            }
        }
        out
    }

    pub fn omega(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.pairing * y))
    }

    pub fn axioms_residual(&self) -> AxiomReport {
        let dim = self.dim();
        let e: Vec<DVector<f64>> = (0..dim).map(|i| self.basis_vector(i)).collect();
        let sign = |p: usize| if p.is_multiple_of(2) { 1.0 } else { -1.0 };
        let de: Vec<DVector<f64>> = e.iter().map(|v| self.d(v)).collect();
        let mut r = AxiomReport {
            parity: 0.0,
            leibniz: 0.0,
            cyclicity: 0.0,
            compatibility: 0.0,
            symmetry: 0.0,
            nondegeneracy: f64::INFINITY,
            mixed_pairing: 0.0,
            d_squared: 0.0,
            bracket_parity: 0.0,
            antisymmetry: 0.0,
            jacobi: 0.0,
        };
        for i in 0..dim {
            for k in 0..dim {
                if self.parity(k) == self.parity(i) {
                    r.parity = r.parity.max(self.differential[(k, i)].abs());
                }
            }
            r.d_squared = r.d_squared.max(self.d(&de[i]).amax());
        }
        let brackets: Vec<Vec<DVector<f64>>> = (0..dim).map(|i| (0..dim).map(|j| self.bracket(&e[i], &e[j])).collect()).collect();
        for i in 0..dim {
            let pi = self.parity(i);
            for j in 0..dim {
                let pj = self.parity(j);
                let b = &brackets[i][j];
                for k in 0..dim {
                    if self.parity(k) != (pi + pj) % 2 {
                        r.bracket_parity = r.bracket_parity.max(b[k].abs());
                    }
                }
                let anti = b + &brackets[j][i] * sign(pi * pj);
                r.antisymmetry = r.antisymmetry.max(anti.amax());
                let leib = self.d(b) - self.bracket(&de[i], &e[j]) - self.bracket(&e[i], &de[j]) * sign(pi);
                r.leibniz = r.leibniz.max(leib.amax());
                let compat = self.omega(&de[i], &e[j]) + sign(pi) * self.omega(&e[i], &de[j]);
                r.compatibility = r.compatibility.max(compat.abs());
                let sym = self.pairing[(j, i)] - sign(pi * pj) * self.pairing[(i, j)];
                r.symmetry = r.symmetry.max(sym.abs());
                if pi != pj {
                    r.mixed_pairing = r.mixed_pairing.max(self.pairing[(i, j)].abs());
                }
                for k in 0..dim {
                    let cyc = self.omega(b, &e[k]) - self.omega(&e[i], &brackets[j][k]);
                    r.cyclicity = r.cyclicity.max(cyc.abs());
                    let lhs = self.bracket(&e[i], &brackets[j][k]);
                    let rhs = self.bracket(b, &e[k]) + self.bracket(&e[j], &brackets[i][k]) * sign(pi * pj);
                    r.jacobi = r.jacobi.max((lhs - rhs).amax());
                }
            }
        }
        for (start, len) in [(0, self.d0), (self.d0, self.d1)] {
            if len == 0 {
                continue;
            }
            let block = self.pairing.view((start, start), (len, len)).into_owned();
            let sv = block.singular_values();
            let max = sv.max();
            let rel = if max > 0.0 { sv.min() / max } else { 0.0 };
            r.nondegeneracy = r.nondegeneracy.min(rel);
        }
        r
    }

    /// `dx + [x,x]/2` for odd `x`.
    pub fn mc_residual(&self, x: &DVector<f64>) -> DVector<f64> {
        self.d(x) + self.bracket(x, x) * 0.5
    }

    /// Derivative of [`Self::mc_residual`] at `x` in direction `v`.
    pub fn mc_linearization(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.d(v) + (self.bracket(x, v) + self.bracket(v, x)) * 0.5
    }

    /// `xi_a(x) = [a,x] - da`.
    pub fn gauge_field(&self, a: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
        self.bracket(a, x) - self.d(a)
    }

    /// `phi(x)(a) = omega(dx + [x,x]/2, a)`.
    pub fn moment(&self, x: &DVector<f64>, a: &DVector<f64>) -> f64 {
        self.omega(&self.mc_residual(x), a)
    }

    /// The same algebra with differential `d + ad_{x0}`; this is again a
    /// cyclic DGLA when `x0` is a Maurer-Cartan element.
    pub fn twist(&self, x0: &DVector<f64>) -> Result<Self> {
        let dim = self.dim();
        let mut differential = self.differential.clone();
        for j in 0..dim {
            let col = self.bracket(x0, &self.basis_vector(j));
            for i in 0..dim {
                differential[(i, j)] += col[i];
            }
        }
        CyclicDgla::new(self.d0, self.d1, differential, self.bracket.clone(), self.pairing.clone())
    }

    /// Matrix of `v -> mc_linearization(x, v)` restricted to `L_1 -> L_0`.
    fn mc_jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(self.d0, self.d1, |i, j| {
            self.mc_linearization(x, &self.basis_vector(self.d0 + j))[i]
        })
    }

    /// Damped Gauss-Newton on `mc_residual(x) = 0` over `L_1` from `start`.
    pub fn find_mc_point(&self, start: &DVector<f64>, max_iter: usize, tol: f64) -> Result<DVector<f64>> {
        let mut x = start.clone();
        let mut r = self.mc_residual(&x);
        let mut norm = r.norm();
        for _ in 0..max_iter {
            if norm <= tol {
                return Ok(x);
            }
            let j = self.mc_jacobian(&x);
            let rhs = DVector::from_iterator(self.d0, r.rows(0, self.d0).iter().copied());
            let step = linalg::lstsq(&j, &rhs, 1e-12);
            let mut damping = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let mut trial = x.clone();
                for k in 0..self.d1 {
                    trial[self.d0 + k] -= damping * step[k];
                }
                let tr = self.mc_residual(&trial);
                if tr.norm() < norm {
                    x = trial;
                    r = tr;
                    norm = r.norm();
                    improved = true;
                    break;
                }
                damping *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if norm <= tol {
            Ok(x)
        } else {
            Err(Error::NewtonFailure { residual: norm })
        }
    }

    /// A random odd vector with Gaussian coefficients of the given scale.
    pub fn random_odd(&self, rng: &mut impl Rng, scale: f64) -> DVector<f64> {
        let c: Vec<f64> = (0..self.d1).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
        self.odd(&c)
    }

    pub fn random_even(&self, rng: &mut impl Rng, scale: f64) -> DVector<f64> {
        let c: Vec<f64> = (0..self.d0).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
        self.even(&c)
    }
}

/// Residual of `xi_{[a,b]} = D xi_a . xi_b - D xi_b . xi_a` at `x`, where
/// `D xi_a = ad_a` is the linear part of the affine field `xi_a`.
pub fn homomorphism_residual(l: &CyclicDgla, a: &DVector<f64>, b: &DVector<f64>, x: &DVector<f64>) -> f64 {
    let lhs = l.gauge_field(&l.bracket(a, b), x);
    let rhs = l.bracket(a, &l.gauge_field(b, x)) - l.bracket(b, &l.gauge_field(a, x));
    (lhs - rhs).amax()
}

/// `omega([a,u],v) + omega(u,[a,v])` for odd `u, v`.
pub fn invariance_residual(l: &CyclicDgla, a: &DVector<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    (l.omega(&l.bracket(a, u), v) + l.omega(u, &l.bracket(a, v))).abs()
}

/// Central difference of `t -> moment(x + t v, a)` minus `omega(xi_a(x), v)`.
pub fn moment_fd_residual(l: &CyclicDgla, x: &DVector<f64>, a: &DVector<f64>, v: &DVector<f64>, h: f64) -> f64 {
    let fd = (l.moment(&(x + v * h), a) - l.moment(&(x - v * h), a)) / (2.0 * h);
    (fd - l.omega(&l.gauge_field(a, x), v)).abs()
}

/// `|| d/dt mc_residual(x + t xi_a(x)) ||` at `t = 0`.
pub fn tangency_residual(l: &CyclicDgla, x: &DVector<f64>, a: &DVector<f64>) -> f64 {
    l.mc_linearization(x, &l.gauge_field(a, x)).amax()
}

/// Cohomology classes of the closed genus-`g` surface used by the toy instance:
/// `1`, `vol`, `alpha_1, beta_1, ..., alpha_g, beta_g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    One,
    Vol,
    Alpha(usize),
    Beta(usize),
}

impl Class {
    fn degree(self) -> usize {
        match self {
            Class::One => 0,
            Class::Vol => 2,
            _ => 1,
        }
    }
}

/// Cup product `u v = coef * w`, or `None` when it vanishes.
fn cup(u: Class, v: Class) -> Option<(f64, Class)> {
    match (u, v) {
        (Class::One, w) | (w, Class::One) => Some((1.0, w)),
        (Class::Alpha(i), Class::Beta(j)) if i == j => Some((1.0, Class::Vol)),
        (Class::Beta(i), Class::Alpha(j)) if i == j => Some((-1.0, Class::Vol)),
        _ => None,
    }
}

fn classes(genus: usize) -> (Vec<Class>, Vec<Class>) {
    let even = vec![Class::One, Class::Vol];
    let odd = (0..genus).flat_map(|i| [Class::Alpha(i), Class::Beta(i)]).collect();
    (even, odd)
}

/// `H^*(surface of genus g) (x) g` with the cup product tensored with the
/// matrix commutator, the intersection pairing tensored with `Re tr(xy)`,
/// and zero differential. The even part is `(H^0 + H^2) (x) g`, the odd part
/// `H^1 (x) g`.
pub fn surface_toy_instance(genus: usize, spec: &GroupSpec) -> Result<CyclicDgla> {
    if genus == 0 {
        return Err(Error::InvalidSpec("genus must be at least 1".into()));
    }
    let basis = AlgebraBasis::new(*spec);
    let m = basis.dim();
    let elems = basis.elements();
    let (even, odd) = classes(genus);
    let all: Vec<Class> = even.iter().chain(&odd).copied().collect();
    let dim = all.len() * m;
    let index = |c: Class, a: usize| all.iter().position(|&x| x == c).expect("known class") * m + a;

    // Structure constants and Gram matrix of the matrix algebra.
    let mut f = vec![0.0; m * m * m];
    for a in 0..m {
        for b in 0..m {
            let coords = basis.coordinates(&linalg::commutator(&elems[a], &elems[b]));
            f[(a * m + b) * m..(a * m + b + 1) * m].copy_from_slice(&coords);
        }
    }
    let gram = DMatrix::from_fn(m, m, |a, b| pairing_raw(&elems[a], &elems[b]));

    let mut bracket = vec![0.0; dim * dim * dim];
    let mut pairing = DMatrix::zeros(dim, dim);
    for &u in &all {
        for &v in &all {
            let Some((coef, w)) = cup(u, v) else { continue };
            for a in 0..m {
                for b in 0..m {
                    let (i, j) = (index(u, a), index(v, b));
                    for c in 0..m {
                        bracket[(i * dim + j) * dim + index(w, c)] += coef * f[(a * m + b) * m + c];
                    }
                    if w == Class::Vol && u.degree() + v.degree() == 2 {
                        pairing[(i, j)] = coef * gram[(a, b)];
                    }
                }
            }
        }
    }
    CyclicDgla::new(2 * m, 2 * genus * m, DMatrix::zeros(dim, dim), bracket, pairing)
}

/// The toy instance twisted by the Maurer-Cartan element `alpha_1 (x) X` for a
/// random `X`, which gives a nonzero differential.
pub fn twisted_toy_instance(genus: usize, spec: &GroupSpec, seed: u64) -> Result<CyclicDgla> {
    let l = surface_toy_instance(genus, spec)?;
    let m = AlgebraBasis::new(*spec).dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![0.0; l.d1];
    for c in coeffs.iter_mut().take(m) {
        *c = rng.sample(StandardNormal);
    }
    let x0 = l.odd(&coeffs);
    l.twist(&x0)
}
