//! Matrix groups, their Lie algebras, the trace invariant and variation
//! functions.
//!
//! Every group here is a reductive subgroup of `GL(n, C)` carrying the
//! invariant function `f(g) = Re tr g` and the invariant form
//! `<x, y> = Re tr(xy)`. The variation function `F: G -> g` is the gradient of
//! `f` with respect to that form: `<F(g), x> = d/dt f(g exp(tx))` at `t = 0`.
//! For `GL` it is the inclusion, for the other kinds it is `(g - g^-1) / 2`;
//! [`AlgebraBasis::project`] computes the orthogonal projection onto `g`
//! directly so that both closed forms can be cross-checked.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, ONE};
use crate::tolerance::TAU_GRP;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupKind {
    #[serde(rename = "GL_R")]
    GlReal,
    #[serde(rename = "GL_C")]
    GlComplex,
    /// `O(p, q)`, real matrices preserving `diag(1^p, (-1)^q)`.
    #[serde(rename = "O_pq")]
    Orthogonal,
    /// `O(n, C)`.
    #[serde(rename = "O_C")]
    ComplexOrthogonal,
    /// `U(p, q)`.
    #[serde(rename = "U_pq")]
    Unitary,
    /// `Sp(n, R)` with `n` even.
    #[serde(rename = "Sp_R")]
    Symplectic,
    /// `Sp(p, q)` as `2(p+q) x 2(p+q)` complex matrices, see [`GroupSpec::sp_pq`].
    #[serde(rename = "Sp_pq")]
    QuaternionicUnitary,
}

impl GroupKind {
    pub fn name(self) -> &'static str {
        match self {
            GroupKind::GlReal => "GL_R",
            GroupKind::GlComplex => "GL_C",
            GroupKind::Orthogonal => "O_pq",
            GroupKind::ComplexOrthogonal => "O_C",
            GroupKind::Unitary => "U_pq",
            GroupKind::Symplectic => "Sp_R",
            GroupKind::QuaternionicUnitary => "Sp_pq",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "GL_R" => GroupKind::GlReal,
            "GL_C" => GroupKind::GlComplex,
            "O_pq" | "O" => GroupKind::Orthogonal,
            "O_C" => GroupKind::ComplexOrthogonal,
            "U_pq" | "U" => GroupKind::Unitary,
            "Sp_R" => GroupKind::Symplectic,
            "Sp_pq" => GroupKind::QuaternionicUnitary,
            other => return Err(Error::InvalidSpec(format!("unknown group kind {other:?}"))),
        })
    }

    /// Real kinds have matrices with vanishing imaginary part.
    pub fn is_real(self) -> bool {
        matches!(
            self,
            GroupKind::GlReal | GroupKind::Orthogonal | GroupKind::Symplectic
        )
    }

    /// `GL` kinds pair with the oriented bracket; all others with the
    /// unoriented one.
    pub fn is_general_linear(self) -> bool {
        matches!(self, GroupKind::GlReal | GroupKind::GlComplex)
    }

    pub const ALL: [GroupKind; 7] = [
        GroupKind::GlReal,
        GroupKind::GlComplex,
        GroupKind::Orthogonal,
        GroupKind::ComplexOrthogonal,
        GroupKind::Unitary,
        GroupKind::Symplectic,
        GroupKind::QuaternionicUnitary,
    ];
}

#[derive(Deserialize, Serialize)]
struct RawSpec {
    kind: GroupKind,
    n: usize,
    #[serde(default)]
    p: usize,
    #[serde(default)]
    q: usize,
}

/// A matrix group: kind, matrix size `n` and signature `(p, q)` where it applies.
///
/// For `Sp_pq` the matrix size is `n = 2(p + q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct GroupSpec {
    kind: GroupKind,
    n: usize,
    p: usize,
    q: usize,
}

impl TryFrom<RawSpec> for GroupSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let (p, q) = if raw.p + raw.q == 0 {
            match raw.kind {
                GroupKind::Orthogonal | GroupKind::Unitary => (raw.n, 0),
                GroupKind::QuaternionicUnitary => (raw.n / 2, 0),
                _ => (0, 0),
            }
        } else {
            (raw.p, raw.q)
        };
        GroupSpec::new(raw.kind, raw.n, p, q)
    }
}

impl From<GroupSpec> for RawSpec {
    fn from(s: GroupSpec) -> Self {
        RawSpec {
            kind: s.kind,
            n: s.n,
            p: s.p,
            q: s.q,
        }
    }
}

impl GroupSpec {
    pub fn new(kind: GroupKind, n: usize, p: usize, q: usize) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if n == 0 {
            return bad("matrix size must be positive".into());
        }
        match kind {
            GroupKind::Orthogonal | GroupKind::Unitary if p + q != n => {
                return bad(format!("signature ({p},{q}) does not add up to n={n}"));
            }
            GroupKind::Symplectic if !n.is_multiple_of(2) => {
                return bad(format!("Sp_R needs even n, got {n}"));
            }
            GroupKind::QuaternionicUnitary if 2 * (p + q) != n => {
                return bad(format!("Sp_pq needs n = 2(p+q), got n={n}, ({p},{q})"));
            }
            _ => {}
        }
        let (p, q) = match kind {
            GroupKind::Orthogonal | GroupKind::Unitary | GroupKind::QuaternionicUnitary => (p, q),
            _ => (0, 0),
        };
        Ok(GroupSpec { kind, n, p, q })
    }

    pub fn gl_r(n: usize) -> Self {
        Self::new(GroupKind::GlReal, n, 0, 0).unwrap()
    }
    pub fn gl_c(n: usize) -> Self {
        Self::new(GroupKind::GlComplex, n, 0, 0).unwrap()
    }
    pub fn o(n: usize) -> Self {
        Self::new(GroupKind::Orthogonal, n, n, 0).unwrap()
    }
    pub fn o_pq(p: usize, q: usize) -> Self {
        Self::new(GroupKind::Orthogonal, p + q, p, q).unwrap()
    }
    pub fn o_c(n: usize) -> Self {
        Self::new(GroupKind::ComplexOrthogonal, n, 0, 0).unwrap()
    }
    pub fn u(n: usize) -> Self {
        Self::new(GroupKind::Unitary, n, n, 0).unwrap()
    }
    pub fn u_pq(p: usize, q: usize) -> Self {
        Self::new(GroupKind::Unitary, p + q, p, q).unwrap()
    }
    pub fn sp_r(n: usize) -> Self {
        Self::new(GroupKind::Symplectic, n, 0, 0).unwrap()
    }
    /// `Sp(p, q)` realised as the complex `2(p+q)`-square matrices preserving
    /// the complex symplectic form `Omega` and the Hermitian form
    /// `diag(I_pq, I_pq)`.
    pub fn sp_pq(p: usize, q: usize) -> Self {
        Self::new(GroupKind::QuaternionicUnitary, 2 * (p + q), p, q).unwrap()
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn signature(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    /// Parses `KIND:n` or `KIND:p,q`, e.g. `GL_R:2`, `O_pq:1,1`, `Sp_pq:1,0`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, dims) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidSpec(format!("expected KIND:dims, got {s:?}")))?;
        let kind = GroupKind::parse(kind)?;
        let nums: Vec<usize> = dims
            .split(',')
            .map(|d| d.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidSpec(format!("{s:?}: {e}")))?;
        match (kind, nums.as_slice()) {
            (GroupKind::QuaternionicUnitary, [p, q]) => Self::new(kind, 2 * (p + q), *p, *q),
            (_, [p, q]) => Self::new(kind, p + q, *p, *q),
            (GroupKind::Orthogonal | GroupKind::Unitary, [n]) => Self::new(kind, *n, *n, 0),
            (GroupKind::QuaternionicUnitary, [n]) => Self::new(kind, *n, n / 2, 0),
            (_, [n]) => Self::new(kind, *n, 0, 0),
            _ => Err(Error::InvalidSpec(format!("bad dimensions in {s:?}"))),
        }
    }

    fn signature_diag(&self, copies: usize) -> CMat {
        let block: Vec<f64> = (0..self.p)
            .map(|_| 1.0)
            .chain((0..self.q).map(|_| -1.0))
            .collect();
        let d: Vec<f64> = (0..copies).flat_map(|_| block.iter().copied()).collect();
        linalg::from_real_diag(&d)
    }

    fn omega(&self) -> CMat {
        let m = self.n / 2;
        let mut o = CMat::zeros(self.n, self.n);
        for i in 0..m {
            o[(i, m + i)] = ONE;
            o[(m + i, i)] = -ONE;
        }
        o
    }

    /// Defining matrices of the group: `J` for `O_pq`/`U_pq`, `Omega` for
    /// `Sp_R`, `(Omega, K)` for `Sp_pq`.
    pub fn forms(&self) -> Vec<CMat> {
        match self.kind {
            GroupKind::GlReal | GroupKind::GlComplex | GroupKind::ComplexOrthogonal => vec![],
            GroupKind::Orthogonal | GroupKind::Unitary => vec![self.signature_diag(1)],
            GroupKind::Symplectic => vec![self.omega()],
            GroupKind::QuaternionicUnitary => vec![self.omega(), self.signature_diag(2)],
        }
    }

    fn check_shape(&self, m: &CMat) -> Result<()> {
        if m.shape() != (self.n, self.n) {
            return Err(Error::ShapeMismatch(format!(
                "{} expects {}x{} matrices, got {}x{}",
                self,
                self.n,
                self.n,
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::Orthogonal | GroupKind::Unitary | GroupKind::QuaternionicUnitary => {
                write!(f, "{}({},{})", self.kind.name(), self.p, self.q)
            }
            _ => write!(f, "{}({})", self.kind.name(), self.n),
        }
    }
}

fn defects(spec: &GroupSpec, m: &CMat, algebra: bool) -> Vec<CMat> {
    let mut out = Vec::new();
    if spec.kind.is_real() {
        out.push(m.map(|z| c(z.im)));
    }
    let forms = spec.forms();
    match spec.kind {
        GroupKind::GlReal | GroupKind::GlComplex => {}
        GroupKind::ComplexOrthogonal => {
            let id = linalg::identity(spec.n);
            out.push(if algebra {
                m.transpose() + m
            } else {
                m.transpose() * m - id
            });
        }
        GroupKind::Orthogonal | GroupKind::Symplectic => {
            let j = &forms[0];
            out.push(if algebra {
                m.transpose() * j + j * m
            } else {
                m.transpose() * j * m - j
            });
        }
        GroupKind::Unitary => {
            let j = &forms[0];
            out.push(if algebra {
                m.adjoint() * j + j * m
            } else {
                m.adjoint() * j * m - j
            });
        }
        GroupKind::QuaternionicUnitary => {
            let (o, k) = (&forms[0], &forms[1]);
            if algebra {
                out.push(m.transpose() * o + o * m);
                out.push(m.adjoint() * k + k * m);
            } else {
                out.push(m.transpose() * o * m - o);
                out.push(m.adjoint() * k * m - k);
            }
        }
    }
    out
}

fn combined_norm(parts: &[CMat]) -> f64 {
    parts.iter().map(|p| p.norm_squared()).sum::<f64>().sqrt()
}

/// Frobenius norm of the defining-equation defect of `g`, e.g. `||g^T J g - J||`
/// for `O(p, q)`. Singular matrices have infinite residual; real kinds also
/// count imaginary parts.
pub fn membership_residual(spec: &GroupSpec, g: &CMat) -> f64 {
    if g.shape() != (spec.n, spec.n) || !linalg::is_finite(g) {
        return f64::INFINITY;
    }
    let det = g.clone().lu().determinant();
    if det.norm() < 1e-300 || !det.re.is_finite() {
        return f64::INFINITY;
    }
    combined_norm(&defects(spec, g, false))
}

/// Frobenius norm of the linearised defect, e.g. `||x^T J + J x||` for `o(p, q)`.
pub fn algebra_residual(spec: &GroupSpec, x: &CMat) -> f64 {
    if x.shape() != (spec.n, spec.n) || !linalg::is_finite(x) {
        return f64::INFINITY;
    }
    combined_norm(&defects(spec, x, true))
}

/// An element of a matrix group, checked on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    spec: GroupSpec,
    matrix: CMat,
}

impl GroupElement {
    /// Accepts `g` when its membership residual is at most
    /// `TAU_GRP * (1 + ||g||^2)`; the scale absorbs rounding in products.
    pub fn new(spec: GroupSpec, matrix: CMat) -> Result<Self> {
        spec.check_shape(&matrix)?;
        let residual = membership_residual(&spec, &matrix);
        if !(residual <= TAU_GRP * (1.0 + matrix.norm_squared())) {
            return Err(Error::InvalidElement {
                spec: spec.to_string(),
                residual,
            });
        }
        let matrix = if spec.kind.is_real() {
            matrix.map(|z| c(z.re))
        } else {
            matrix
        };
        Ok(GroupElement { spec, matrix })
    }

    pub(crate) fn new_unchecked(spec: GroupSpec, matrix: CMat) -> Self {
        GroupElement { spec, matrix }
    }

    pub fn identity(spec: GroupSpec) -> Self {
        GroupElement {
            spec,
            matrix: linalg::identity(spec.n),
        }
    }

    /// `exp(x)`, which lies in the group for every algebra element.
    pub fn exp(x: &AlgebraElement) -> Self {
        let g = linalg::expm(&x.matrix);
        let g = if x.spec.kind.is_real() {
            g.map(|z| c(z.re))
        } else {
            g
        };
        GroupElement {
            spec: x.spec,
            matrix: g,
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }
    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(GroupElement {
            spec: self.spec,
            matrix: linalg::inverse(&self.matrix, "group inverse")?,
        })
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            spec: self.spec,
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// `h^-1 g h`.
    pub fn conjugate_by(&self, h: &GroupElement) -> Result<Self> {
        let h_inv = linalg::inverse(&h.matrix, "conjugation")?;
        Ok(GroupElement {
            spec: self.spec,
            matrix: &h_inv * &self.matrix * &h.matrix,
        })
    }

    pub fn residual(&self) -> f64 {
        membership_residual(&self.spec, &self.matrix)
    }
}

/// An element of the Lie algebra of a [`GroupSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    spec: GroupSpec,
    matrix: CMat,
}

impl AlgebraElement {
    pub fn new(spec: GroupSpec, matrix: CMat) -> Result<Self> {
        spec.check_shape(&matrix)?;
        let residual = algebra_residual(&spec, &matrix);
        if !(residual <= TAU_GRP * (1.0 + matrix.norm())) {
            return Err(Error::InvalidElement {
                spec: format!("Lie algebra of {spec}"),
                residual,
            });
        }
        Ok(AlgebraElement { spec, matrix })
    }

    pub(crate) fn new_unchecked(spec: GroupSpec, matrix: CMat) -> Self {
        AlgebraElement { spec, matrix }
    }

    pub fn zero(spec: GroupSpec) -> Self {
        AlgebraElement {
            spec,
            matrix: CMat::zeros(spec.n, spec.n),
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }
    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn bracket(&self, other: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            spec: self.spec,
            matrix: linalg::commutator(&self.matrix, &other.matrix),
        }
    }

    pub fn scale(&self, s: f64) -> AlgebraElement {
        AlgebraElement {
            spec: self.spec,
            matrix: &self.matrix * c(s),
        }
    }

    /// `Ad_h x = h^-1 x h`.
    pub fn adjoint_by(&self, h: &GroupElement) -> Result<Self> {
        let h_inv = linalg::inverse(h.matrix(), "adjoint action")?;
        Ok(AlgebraElement {
            spec: self.spec,
            matrix: &h_inv * &self.matrix * h.matrix(),
        })
    }

    pub fn residual(&self) -> f64 {
        algebra_residual(&self.spec, &self.matrix)
    }
}

/// A monomial `scalar * [x_1 ⊗ ... ⊗ x_k]` of the universal enveloping algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopingWord {
    pub factors: Vec<AlgebraElement>,
    pub scalar: f64,
}

impl EnvelopingWord {
    pub fn unit(scalar: f64) -> Self {
        EnvelopingWord {
            factors: Vec::new(),
            scalar,
        }
    }

    pub fn new(factors: Vec<AlgebraElement>) -> Self {
        EnvelopingWord {
            factors,
            scalar: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// `f(g) = Re tr g`.
pub fn invariant_f(g: &GroupElement) -> f64 {
    linalg::re_trace(g.matrix())
}

pub fn pairing_raw(x: &CMat, y: &CMat) -> f64 {
    // Re tr(xy) without forming the product.
    let n = x.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (x[(i, k)] * y[(k, i)]).re;
        }
    }
    acc
}

/// `<x, y> = Re tr(xy)`.
pub fn pairing(x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
    if x.spec != y.spec {
        return Err(Error::ShapeMismatch(format!(
            "pairing between {} and {}",
            x.spec, y.spec
        )));
    }
    Ok(pairing_raw(&x.matrix, &y.matrix))
}

/// Closed form of the variation function for the trace invariant.
pub fn variation(g: &GroupElement) -> Result<AlgebraElement> {
    let spec = *g.spec();
    if spec.kind.is_general_linear() {
        return Ok(AlgebraElement::new_unchecked(spec, g.matrix().clone()));
    }
    let g_inv = linalg::inverse(g.matrix(), "variation")?;
    Ok(AlgebraElement::new_unchecked(
        spec,
        (g.matrix() - g_inv) * c(0.5),
    ))
}

fn product(factors: &[AlgebraElement], n: usize, reversed: bool) -> CMat {
    let mut acc = linalg::identity(n);
    if reversed {
        for x in factors.iter().rev() {
            acc *= x.matrix();
        }
    } else {
        for x in factors {
            acc *= x.matrix();
        }
    }
    acc
}

fn check_factors(g: &GroupElement, w: &EnvelopingWord) -> Result<()> {
    if let Some(bad) = w.factors.iter().find(|x| x.spec != g.spec) {
        return Err(Error::ShapeMismatch(format!(
            "enveloping factor in {} applied to element of {}",
            bad.spec, g.spec
        )));
    }
    Ok(())
}

/// `F^(g; [x_1 ⊗ ... ⊗ x_k])`: the mixed derivative of `F(g exp(t_1 x_1) ... exp(t_k x_k))`.
///
/// `g x_1...x_k` for `GL`, `(g x_1...x_k + (-1)^{k+1} x_k...x_1 g^-1) / 2` otherwise.
pub fn variation_hat(g: &GroupElement, w: &EnvelopingWord) -> Result<AlgebraElement> {
    check_factors(g, w)?;
    let spec = *g.spec();
    if w.is_empty() {
        return Ok(variation(g)?.scale(w.scalar));
    }
    let n = spec.n;
    let forward = g.matrix() * product(&w.factors, n, false);
    let m = if spec.kind.is_general_linear() {
        forward
    } else {
        let g_inv = linalg::inverse(g.matrix(), "variation_hat")?;
        let sign = if w.len() % 2 == 1 { 1.0 } else { -1.0 };
        (forward + product(&w.factors, n, true) * g_inv * c(sign)) * c(0.5)
    };
    Ok(AlgebraElement::new_unchecked(spec, m * c(w.scalar)))
}

/// `f^(g; [x_1 ⊗ ... ⊗ x_{k+1}]) = <F^(g; [x_1 ⊗ ... ⊗ x_k]), x_{k+1}>`,
/// and `scalar * f(g)` for the unit.
pub fn f_hat(g: &GroupElement, w: &EnvelopingWord) -> Result<f64> {
    check_factors(g, w)?;
    match w.factors.split_last() {
        None => Ok(w.scalar * invariant_f(g)),
        Some((last, init)) => {
            let head = EnvelopingWord {
                factors: init.to_vec(),
                scalar: w.scalar,
            };
            Ok(pairing_raw(variation_hat(g, &head)?.matrix(), last.matrix()))
        }
    }
}

/// A real basis of the Lie algebra together with a basis that is orthonormal
/// for `<x, y> = Re tr(xy)` up to sign (the form is indefinite in general).
#[derive(Clone, Debug)]
pub struct AlgebraBasis {
    spec: GroupSpec,
    /// Orthonormal for the real Frobenius inner product.
    euclidean: Vec<CMat>,
    /// `<e_i, e_j> = sign_i δ_ij`.
    pseudo_orthonormal: Vec<CMat>,
    signs: Vec<f64>,
}

impl AlgebraBasis {
    /// Computes the algebra as the kernel of its defining linear equations.
    pub fn new(spec: GroupSpec) -> Self {
        let n = spec.n;
        let dim = 2 * n * n;
        let mut columns = Vec::with_capacity(dim);
        for k in 0..dim {
            let mut e = DVector::zeros(dim);
            e[k] = 1.0;
            let m = linalg::from_real_vec(&e, n, n);
            let parts: Vec<f64> = defects(&spec, &m, true)
                .iter()
                .flat_map(|d| linalg::to_real_vec(d).iter().copied().collect::<Vec<_>>())
                .collect();
            columns.push(DVector::from_vec(parts));
        }
        let rows = columns.first().map_or(0, |v| v.len());
        let constraint = if rows == 0 {
            DMatrix::zeros(0, dim)
        } else {
            DMatrix::from_columns(&columns)
        };
        let kernel = linalg::kernel(&constraint, dim, 1e-12);
        let euclidean: Vec<CMat> = kernel
            .column_iter()
            .map(|col| linalg::from_real_vec(&col.into_owned(), n, n))
            .collect();

        let d = euclidean.len();
        let gram = DMatrix::from_fn(d, d, |i, j| pairing_raw(&euclidean[i], &euclidean[j]));
        let eig = SymmetricEigen::new(gram);
        let mut pseudo_orthonormal = Vec::with_capacity(d);
        let mut signs = Vec::with_capacity(d);
        for k in 0..d {
            let lambda = eig.eigenvalues[k];
            let scale = 1.0 / lambda.abs().sqrt();
            let mut v = CMat::zeros(n, n);
            for (j, e) in euclidean.iter().enumerate() {
                v += e * c(eig.eigenvectors[(j, k)] * scale);
            }
            pseudo_orthonormal.push(v);
            signs.push(lambda.signum());
        }
        AlgebraBasis {
            spec,
            euclidean,
            pseudo_orthonormal,
            signs,
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.euclidean.len()
    }

    pub fn elements(&self) -> &[CMat] {
        &self.euclidean
    }

    /// Orthogonal projection of an arbitrary `n x n` matrix onto the algebra
    /// with respect to `Re tr(xy)`.
    pub fn project(&self, y: &CMat) -> AlgebraElement {
        let mut out = CMat::zeros(self.spec.n, self.spec.n);
        for (e, s) in self.pseudo_orthonormal.iter().zip(&self.signs) {
            out += e * c(s * pairing_raw(e, y));
        }
        AlgebraElement::new_unchecked(self.spec, out)
    }

    pub fn combine(&self, coeffs: &[f64]) -> AlgebraElement {
        let mut out = CMat::zeros(self.spec.n, self.spec.n);
        for (e, &a) in self.euclidean.iter().zip(coeffs) {
            out += e * c(a);
        }
        AlgebraElement::new_unchecked(self.spec, out)
    }

    /// Coordinates in the Euclidean-orthonormal basis.
    pub fn coordinates(&self, x: &CMat) -> Vec<f64> {
        let v = linalg::to_real_vec(x);
        self.euclidean
            .iter()
            .map(|e| linalg::to_real_vec(e).dot(&v))
            .collect()
    }

    pub fn random(&self, rng: &mut impl Rng, scale: f64) -> AlgebraElement {
        let coeffs: Vec<f64> = (0..self.dim())
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        self.combine(&coeffs)
    }
}

/// Variation function computed through the generic orthogonal projection.
pub fn variation_by_projection(basis: &AlgebraBasis, g: &GroupElement) -> AlgebraElement {
    basis.project(g.matrix())
}

/// Scale of random algebra elements used by [`random_element`].
pub const RANDOM_SCALE: f64 = 0.5;

/// Element from a seeded RNG: `exp` of a random algebra element, composed with
/// a reflection half of the time for the disconnected kinds.
pub fn random_element_with(basis: &AlgebraBasis, rng: &mut impl Rng, scale: f64) -> GroupElement {
    let spec = *basis.spec();
    let x = basis.random(rng, scale);
    let mut g = GroupElement::exp(&x);
    let disconnected = matches!(
        spec.kind,
        GroupKind::GlReal | GroupKind::Orthogonal | GroupKind::ComplexOrthogonal
    );
    if disconnected && rng.random::<bool>() {
        let mut r = linalg::identity(spec.n);
        r[(0, 0)] = -ONE;
        g = GroupElement::new_unchecked(spec, r * g.matrix());
    }
    g
}

pub fn random_element(spec: &GroupSpec, seed: u64) -> GroupElement {
    let basis = AlgebraBasis::new(*spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_element_with(&basis, &mut rng, RANDOM_SCALE)
}

pub fn random_algebra_element(spec: &GroupSpec, seed: u64) -> AlgebraElement {
    let basis = AlgebraBasis::new(*spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    basis.random(&mut rng, 1.0)
}

/// Central-difference derivative of `f(g exp(tx))` at `t = 0`.
pub fn directional_derivative_fd(g: &GroupElement, x: &AlgebraElement, h: f64) -> f64 {
    let plus = linalg::expm(&(x.matrix() * c(h)));
    let minus = linalg::expm(&(x.matrix() * c(-h)));
    (linalg::re_trace(&(g.matrix() * plus)) - linalg::re_trace(&(g.matrix() * minus))) / (2.0 * h)
}

/// Whether `Re tr A = Re tr A^-1` holds, which is the case for every kind
/// whose variation is `(g - g^-1)/2`.
pub fn trace_inverse_defect(g: &GroupElement) -> Result<f64> {
    let inv = g.inverse()?;
    Ok((invariant_f(g) - invariant_f(&inv)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real, identity, I};
    use crate::tolerance::{FD_STEP, TAU_FD, TAU_NUM};
    use approx::assert_abs_diff_eq;

    fn rot(theta: f64) -> CMat {
        from_real(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()])
    }

    #[test]
    fn trace_invariant_examples() {
        let g = GroupElement::new(GroupSpec::gl_r(3), identity(3)).unwrap();
        assert_eq!(invariant_f(&g), 3.0);
        let g = GroupElement::new(GroupSpec::gl_r(2), linalg::from_real_diag(&[2.0, 0.5])).unwrap();
        assert_eq!(invariant_f(&g), 2.5);
        let g = GroupElement::new(GroupSpec::u(1), CMat::from_element(1, 1, I)).unwrap();
        assert_abs_diff_eq!(invariant_f(&g), 0.0);
    }

    #[test]
    fn pairing_examples() {
        let s = GroupSpec::gl_r(2);
        let e = AlgebraElement::new(s, from_real(2, 2, &[0., 1., 0., 0.])).unwrap();
        let f = AlgebraElement::new(s, from_real(2, 2, &[0., 0., 1., 0.])).unwrap();
        let id = AlgebraElement::new(s, identity(2)).unwrap();
        assert_eq!(pairing(&e, &e).unwrap(), 0.0);
        assert_eq!(pairing(&e, &f).unwrap(), 1.0);
        assert_eq!(pairing(&id, &id).unwrap(), 2.0);
        let other = AlgebraElement::zero(GroupSpec::gl_c(2));
        assert!(matches!(pairing(&e, &other), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn variation_examples() {
        let g = GroupElement::new(GroupSpec::gl_r(2), linalg::from_real_diag(&[2., 3.])).unwrap();
        assert_eq!(variation(&g).unwrap().matrix(), g.matrix());

        let theta = 0.7;
        let g = GroupElement::new(GroupSpec::o(2), rot(theta)).unwrap();
        let expected = from_real(2, 2, &[0., -theta.sin(), theta.sin(), 0.]);
        assert!((variation(&g).unwrap().matrix() - expected).norm() < 1e-14);

        let g = GroupElement::new(
            GroupSpec::u(1),
            CMat::from_element(1, 1, num_complex::Complex64::from_polar(1.0, theta)),
        )
        .unwrap();
        let v = variation(&g).unwrap();
        assert_abs_diff_eq!(v.matrix()[(0, 0)].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.matrix()[(0, 0)].im, theta.sin(), epsilon = 1e-15);
    }

    #[test]
    fn variation_hat_examples() {
        let s = GroupSpec::gl_r(2);
        let x = AlgebraElement::new(s, from_real(2, 2, &[0.3, -1.0, 2.0, 0.1])).unwrap();
        let y = AlgebraElement::new(s, from_real(2, 2, &[1.0, 0.5, -0.2, 0.7])).unwrap();
        let id = GroupElement::identity(s);
        let out = variation_hat(&id, &EnvelopingWord::new(vec![x.clone()])).unwrap();
        assert_eq!(out.matrix(), x.matrix());

        let g = GroupElement::new(s, linalg::from_real_diag(&[2., 3.])).unwrap();
        let out = variation_hat(&g, &EnvelopingWord::new(vec![x.clone(), y.clone()])).unwrap();
        let expected = g.matrix() * x.matrix() * y.matrix();
        assert!((out.matrix() - expected).norm() < 1e-14);

        let so = GroupSpec::o(2);
        let skew = AlgebraElement::new(so, from_real(2, 2, &[0., -1.3, 1.3, 0.])).unwrap();
        let out = variation_hat(&GroupElement::identity(so), &EnvelopingWord::new(vec![skew.clone()]))
            .unwrap();
        assert!((out.matrix() - skew.matrix()).norm() < 1e-15);
    }

    #[test]
    fn f_hat_examples() {
        let s = GroupSpec::gl_r(2);
        let id = GroupElement::identity(s);
        let x = AlgebraElement::new(s, from_real(2, 2, &[1., 0., 0., 0.])).unwrap();
        assert_eq!(f_hat(&id, &EnvelopingWord::new(vec![x])).unwrap(), 1.0);

        let g = random_element(&GroupSpec::u_pq(1, 1), 4);
        assert_eq!(f_hat(&g, &EnvelopingWord::unit(1.0)).unwrap(), invariant_f(&g));

        let e = AlgebraElement::new(s, from_real(2, 2, &[0., 1., 0., 0.])).unwrap();
        let f = AlgebraElement::new(s, from_real(2, 2, &[0., 0., 1., 0.])).unwrap();
        // Oracle: tr(ef) by explicit product = tr(diag(1, 0)).
        let oracle = (e.matrix() * f.matrix()).trace().re;
        assert_eq!(oracle, 1.0);
        assert_eq!(f_hat(&id, &EnvelopingWord::new(vec![e, f])).unwrap(), oracle);
    }

    #[test]
    fn membership_examples() {
        assert_eq!(membership_residual(&GroupSpec::o_pq(1, 1), &identity(2)), 0.0);
        let r = membership_residual(&GroupSpec::u(2), &linalg::from_real_diag(&[2., 1.]));
        assert_abs_diff_eq!(r, 3.0, epsilon = 1e-15);
        let g = from_real(2, 2, &[1., 2., 3., 4.]);
        assert_eq!(membership_residual(&GroupSpec::gl_r(2), &g), 0.0);
        assert!(membership_residual(&GroupSpec::gl_r(2), &CMat::zeros(2, 2)).is_infinite());
        assert!(GroupElement::new(GroupSpec::u(2), linalg::from_real_diag(&[2., 1.])).is_err());
    }

    #[test]
    fn random_elements_are_deterministic_members() {
        let a = random_element(&GroupSpec::gl_r(2), 1);
        let b = random_element(&GroupSpec::gl_r(2), 1);
        assert_eq!(a, b);
        assert!(a.matrix().clone().lu().determinant().norm() > 0.0);

        let g = random_element(&GroupSpec::o(3), 7);
        let defect = g.matrix().transpose() * g.matrix() - identity(3);
        assert!(defect.norm() <= 1e-10);

        let g = random_element(&GroupSpec::sp_r(2), 0);
        let o = &GroupSpec::sp_r(2).forms()[0];
        assert!((g.matrix().transpose() * o * g.matrix() - o).norm() <= 1e-10);

        for kind in GroupKind::ALL {
            let spec = match kind {
                GroupKind::QuaternionicUnitary => GroupSpec::sp_pq(1, 1),
                GroupKind::Orthogonal => GroupSpec::o_pq(2, 1),
                GroupKind::Unitary => GroupSpec::u_pq(1, 2),
                GroupKind::Symplectic => GroupSpec::sp_r(4),
                _ => GroupSpec::new(kind, 3, 0, 0).unwrap(),
            };
            for seed in 0..5 {
                let g = random_element(&spec, seed);
                assert!(g.residual() <= TAU_GRP, "{spec} seed {seed}: {}", g.residual());
            }
        }
    }

    #[test]
    fn algebra_dimensions() {
        let dims = [
            (GroupSpec::gl_r(2), 4),
            (GroupSpec::gl_c(2), 8),
            (GroupSpec::o(3), 3),
            (GroupSpec::o_pq(1, 1), 1),
            (GroupSpec::o_c(3), 6),
            (GroupSpec::u(2), 4),
            (GroupSpec::u_pq(1, 1), 4),
            (GroupSpec::sp_r(2), 3),
            (GroupSpec::sp_r(4), 10),
            (GroupSpec::sp_pq(1, 0), 3),
            (GroupSpec::sp_pq(2, 0), 10),
            (GroupSpec::sp_pq(1, 1), 10),
        ];
        for (spec, d) in dims {
            assert_eq!(AlgebraBasis::new(spec).dim(), d, "{spec}");
        }
    }

    #[test]
    fn closed_forms_match_projection() {
        for kind in GroupKind::ALL {
            let spec = match kind {
                GroupKind::QuaternionicUnitary => GroupSpec::sp_pq(1, 1),
                GroupKind::Orthogonal => GroupSpec::o_pq(1, 2),
                GroupKind::Unitary => GroupSpec::u_pq(2, 1),
                GroupKind::Symplectic => GroupSpec::sp_r(4),
                _ => GroupSpec::new(kind, 3, 0, 0).unwrap(),
            };
            let basis = AlgebraBasis::new(spec);
            for seed in 0..5 {
                let g = random_element(&spec, seed);
                let closed = variation(&g).unwrap();
                let projected = variation_by_projection(&basis, &g);
                assert!(
                    (closed.matrix() - projected.matrix()).norm() <= 1e-9,
                    "{spec} seed {seed}"
                );
                assert!(closed.residual() <= 1e-9);
            }
        }
    }

    #[test]
    fn variation_is_gradient_and_equivariant() {
        let spec = GroupSpec::u_pq(1, 1);
        let basis = AlgebraBasis::new(spec);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let g = random_element_with(&basis, &mut rng, 0.5);
            let h = random_element_with(&basis, &mut rng, 0.5);
            let x = basis.random(&mut rng, 1.0);
            let fd = directional_derivative_fd(&g, &x, FD_STEP);
            let exact = pairing(&variation(&g).unwrap(), &x).unwrap();
            assert!((fd - exact).abs() <= TAU_FD);

            let lhs = variation(&g.conjugate_by(&h).unwrap()).unwrap();
            let rhs = variation(&g).unwrap().adjoint_by(&h).unwrap();
            assert!((lhs.matrix() - rhs.matrix()).norm() <= TAU_NUM);
        }
    }

    #[test]
    fn sp_pq_spec_validation() {
        assert!(GroupSpec::new(GroupKind::QuaternionicUnitary, 3, 1, 0).is_err());
        assert!(GroupSpec::new(GroupKind::Symplectic, 3, 0, 0).is_err());
        assert!(GroupSpec::new(GroupKind::Orthogonal, 3, 1, 1).is_err());
        assert_eq!(GroupSpec::parse("Sp_pq:1,1").unwrap(), GroupSpec::sp_pq(1, 1));
        assert_eq!(GroupSpec::parse("O_pq:1,1").unwrap(), GroupSpec::o_pq(1, 1));
        assert_eq!(GroupSpec::parse("GL_R:2").unwrap(), GroupSpec::gl_r(2));
        assert_eq!(GroupSpec::parse("U_pq:2").unwrap(), GroupSpec::u(2));
        let json = r#"{"kind":"O_pq","n":2,"p":1,"q":1}"#;
        let s: GroupSpec = serde_json::from_str(json).unwrap();
        assert_eq!(s, GroupSpec::o_pq(1, 1));
        assert_eq!(serde_json::to_string(&s).unwrap(), json);
        assert!(serde_json::from_str::<GroupSpec>(r#"{"kind":"Sp_R","n":3}"#).is_err());
    }
}
