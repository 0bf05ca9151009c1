//! Surface groups: words in the standard generators, representations and
//! holonomy.
//!
//! The closed orientable surface of genus `g` has fundamental group generated
//! by `a_1, b_1, ..., a_g, b_g` with the single relator `[a_1,b_1]...[a_g,b_g]`.
//! A representation assigns a group element to each generator; its holonomy
//! along a word follows path composition with the later path acting on the
//! left, `hol(uv) = hol(v) hol(u)`. Consequently a representation must satisfy
//! `hol(relator) = I`.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::liealg::{self, AlgebraBasis, GroupElement, GroupSpec};
use crate::linalg::{self, CMat};
use crate::tolerance::{NEWTON_MAX_ITER, TAU_REP};

/// A generator or its inverse. Generators are numbered `1..=2g` with
/// `a_i = 2i - 1` and `b_i = 2i`; inverses are negative.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter(i32);

impl Letter {
    pub fn new(signed_index: i32) -> Self {
        assert!(signed_index != 0, "letter index must be nonzero");
        Letter(signed_index)
    }

    pub fn a(i: u32) -> Self {
        Letter(2 * i as i32 - 1)
    }

    pub fn b(i: u32) -> Self {
        Letter(2 * i as i32)
    }

    pub fn signed_index(self) -> i32 {
        self.0
    }

    /// 1-based generator index.
    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// Handle index `i` of `a_i`/`b_i`.
    pub fn handle(self) -> usize {
        self.generator().div_ceil(2)
    }

    pub fn is_a(self) -> bool {
        self.generator() % 2 == 1
    }

    pub fn name(self) -> String {
        let base = if self.is_a() { 'a' } else { 'b' };
        let base = if self.is_inverse() {
            base.to_ascii_uppercase()
        } else {
            base
        };
        format!("{base}{}", self.handle())
    }

    pub fn parse(token: &str) -> Result<Self> {
        let mut chars = token.chars();
        let head = chars
            .next()
            .ok_or_else(|| Error::Parse("empty letter".into()))?;
        let handle: u32 = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Parse(format!("bad letter {token:?}")))?;
        if handle == 0 {
            return Err(Error::Parse(format!("bad letter {token:?}")));
        }
        let l = match head {
            'a' => Letter::a(handle),
            'b' => Letter::b(handle),
            'A' => Letter::a(handle).inverse(),
            'B' => Letter::b(handle).inverse(),
            _ => return Err(Error::Parse(format!("bad letter {token:?}"))),
        };
        Ok(l)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.generator(), self.is_inverse()).cmp(&(other.generator(), other.is_inverse()))
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum WordKind {
    /// An element of `pi_1` at the marked basepoint.
    Based,
    /// A conjugacy class, i.e. a free homotopy class of loops.
    Cyclic,
}

/// A word in the surface generators. The first letter is the one crossed
/// first after leaving the basepoint.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    letters: Vec<Letter>,
    kind: WordKind,
}

impl Word {
    pub fn new(letters: Vec<Letter>, kind: WordKind) -> Self {
        Word { letters, kind }
    }

    pub fn based(letters: Vec<Letter>) -> Self {
        Word::new(letters, WordKind::Based)
    }

    pub fn cyclic(letters: Vec<Letter>) -> Self {
        Word::new(letters, WordKind::Cyclic)
    }

    pub fn empty(kind: WordKind) -> Self {
        Word::new(Vec::new(), kind)
    }

    pub fn from_indices(indices: &[i32], kind: WordKind) -> Self {
        Word::new(indices.iter().map(|&i| Letter::new(i)).collect(), kind)
    }

    /// Parses whitespace separated letters such as `"a1 b1 A1 B1"`; capitals
    /// are inverses.
    pub fn parse(s: &str, kind: WordKind) -> Result<Self> {
        let letters = s
            .split_whitespace()
            .map(Letter::parse)
            .collect::<Result<Vec<_>>>()?;
        Ok(Word::new(letters, kind))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn kind(&self) -> WordKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: WordKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest handle index used, i.e. the minimal genus the word lives in.
    pub fn max_handle(&self) -> usize {
        self.letters.iter().map(|l| l.handle()).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word::new(
            self.letters.iter().rev().map(|l| l.inverse()).collect(),
            self.kind,
        )
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word::new(letters, self.kind)
    }

    /// Cyclic rotation starting at letter `k`.
    pub fn rotate(&self, k: usize) -> Word {
        if self.letters.is_empty() {
            return self.clone();
        }
        let k = k % self.letters.len();
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        Word::new(letters, self.kind)
    }

    /// Free reduction, plus cyclic reduction for conjugacy classes.
    pub fn reduce(&self) -> Word {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        if self.kind == WordKind::Cyclic {
            let (mut lo, mut hi) = (0, stack.len());
            while hi - lo >= 2 && stack[lo] == stack[hi - 1].inverse() {
                lo += 1;
                hi -= 1;
            }
            stack = stack[lo..hi].to_vec();
        }
        Word::new(stack, self.kind)
    }

    pub fn is_reduced(&self) -> bool {
        self.reduce().letters == self.letters
    }

    /// Reduced cyclic word rotated to its lexicographically least form.
    pub fn canonical(&self) -> Word {
        let r = self.clone().with_kind(WordKind::Cyclic).reduce();
        let n = r.len();
        (0..n.max(1))
            .map(|k| r.rotate(k))
            .min_by(|x, y| x.letters.cmp(&y.letters))
            .unwrap_or(r)
    }

    /// Exponent sum per generator (index 0 is `a_1`).
    pub fn exponent_sums(&self, genus: usize) -> Vec<i64> {
        let mut sums = vec![0; 2 * genus];
        for l in &self.letters {
            sums[l.generator() - 1] += if l.is_inverse() { -1 } else { 1 };
        }
        sums
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .cmp(&other.letters)
            .then((self.kind as u8).cmp(&(other.kind as u8)))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.letters.iter().map(|l| l.name()).collect();
        f.write_str(&names.join(" "))
    }
}

/// The standard presentation of the genus-`g` surface group.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SurfacePresentation {
    genus: usize,
}

impl SurfacePresentation {
    pub fn new(genus: usize) -> Result<Self> {
        if genus == 0 {
            return Err(Error::Parse("genus must be at least 1".into()));
        }
        Ok(SurfacePresentation { genus })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn num_generators(&self) -> usize {
        2 * self.genus
    }

    pub fn generators(&self) -> Vec<Letter> {
        (1..=self.num_generators() as i32).map(Letter::new).collect()
    }

    /// `a_1 b_1 A_1 B_1 ... a_g b_g A_g B_g`.
    pub fn relator(&self) -> Word {
        let mut letters = Vec::with_capacity(4 * self.genus);
        for i in 1..=self.genus as u32 {
            let (a, b) = (Letter::a(i), Letter::b(i));
            letters.extend([a, b, a.inverse(), b.inverse()]);
        }
        Word::based(letters)
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.max_handle() <= self.genus
    }

    pub fn parse_word(&self, s: &str, kind: WordKind) -> Result<Word> {
        let w = Word::parse(s, kind)?;
        if !self.contains(&w) {
            return Err(Error::Parse(format!(
                "word {s:?} uses generators beyond genus {}",
                self.genus
            )));
        }
        Ok(w)
    }
}

/// One elementary homotopy of a loop.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HomotopyMove {
    /// `w -> x w x^-1`.
    Conjugate(Letter),
    /// Insert `x x^-1` before position `at`.
    InsertCancelling { at: usize, letter: Letter },
    /// Insert the relator (or its inverse) before position `at`.
    InsertRelator { at: usize, inverse: bool },
}

/// Applies one move without reducing.
pub fn apply_move(w: &Word, pres: &SurfacePresentation, mv: HomotopyMove) -> Word {
    let mut letters = w.letters.clone();
    match mv {
        HomotopyMove::Conjugate(x) => {
            letters.insert(0, x);
            letters.push(x.inverse());
        }
        HomotopyMove::InsertCancelling { at, letter } => {
            let at = at.min(letters.len());
            letters.splice(at..at, [letter, letter.inverse()]);
        }
        HomotopyMove::InsertRelator { at, inverse } => {
            let at = at.min(letters.len());
            let r = if inverse {
                pres.relator().inverse()
            } else {
                pres.relator()
            };
            letters.splice(at..at, r.letters.iter().copied());
        }
    }
    Word::new(letters, w.kind)
}

pub fn random_move(w: &Word, pres: &SurfacePresentation, rng: &mut impl Rng) -> HomotopyMove {
    let gens = pres.num_generators() as i32;
    let mut letter = || {
        let g = rng.random_range(1..=gens);
        Letter::new(if rng.random::<bool>() { g } else { -g })
    };
    let x = letter();
    let at = rng.random_range(0..=w.len());
    match rng.random_range(0..3) {
        0 => HomotopyMove::Conjugate(x),
        1 => HomotopyMove::InsertCancelling { at, letter: x },
        _ => HomotopyMove::InsertRelator {
            at,
            inverse: rng.random::<bool>(),
        },
    }
}

/// A different reduced representative of the same conjugacy class, produced
/// by `count` random conjugations, cancelling-pair insertions and relator
/// insertions.
pub fn homotopy_moves(w: &Word, pres: &SurfacePresentation, seed: u64, count: usize) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = w.clone();
    for _ in 0..count {
        let mv = random_move(&cur, pres, &mut rng);
        cur = apply_move(&cur, pres, mv);
    }
    cur.with_kind(WordKind::Cyclic).reduce()
}

/// A uniformly random nonempty reduced cyclic word of length at most `max_len`
/// (a cyclic reduction may shorten it).
pub fn random_cyclic_word(pres: &SurfacePresentation, max_len: usize, rng: &mut impl Rng) -> Word {
    let gens = pres.num_generators() as i32;
    loop {
        let len = rng.random_range(1..=max_len.max(1));
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        while letters.len() < len {
            let g = rng.random_range(1..=gens);
            let l = Letter::new(if rng.random::<bool>() { g } else { -g });
            if letters.last() != Some(&l.inverse()) {
                letters.push(l);
            }
        }
        let w = Word::cyclic(letters).reduce();
        if !w.is_empty() {
            return w;
        }
    }
}

/// A homomorphism from the surface group to a matrix group, given by the
/// images of the generators.
#[derive(Clone, Debug)]
pub struct Representation {
    spec: GroupSpec,
    presentation: SurfacePresentation,
    images: Vec<GroupElement>,
    inverses: Vec<CMat>,
}

impl Representation {
    /// Builds a representation without checking the relator; see
    /// [`Representation::relator_residual`].
    pub fn new(
        spec: GroupSpec,
        presentation: SurfacePresentation,
        images: Vec<GroupElement>,
    ) -> Result<Self> {
        if images.len() != presentation.num_generators() {
            return Err(Error::ShapeMismatch(format!(
                "genus {} needs {} images, got {}",
                presentation.genus(),
                presentation.num_generators(),
                images.len()
            )));
        }
        if let Some(g) = images.iter().find(|g| *g.spec() != spec) {
            return Err(Error::ShapeMismatch(format!(
                "image in {} for a representation into {spec}",
                g.spec()
            )));
        }
        let inverses = images
            .iter()
            .map(|g| linalg::inverse(g.matrix(), "representation image"))
            .collect::<Result<Vec<_>>>()?;
        Ok(Representation {
            spec,
            presentation,
            images,
            inverses,
        })
    }

    pub fn trivial(spec: GroupSpec, presentation: SurfacePresentation) -> Self {
        let images = vec![GroupElement::identity(spec); presentation.num_generators()];
        Representation::new(spec, presentation, images).expect("identity images")
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn presentation(&self) -> &SurfacePresentation {
        &self.presentation
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn image(&self, letter: Letter) -> &CMat {
        let k = letter.generator() - 1;
        if letter.is_inverse() {
            &self.inverses[k]
        } else {
            self.images[k].matrix()
        }
    }

    /// Holonomy along a word: `hol(x_1 ... x_m) = rho(x_m) ... rho(x_1)`.
    pub fn holonomy(&self, w: &Word) -> GroupElement {
        let mut acc = linalg::identity(self.spec.n());
        for &l in w.letters() {
            acc = self.image(l) * acc;
        }
        GroupElement::new_unchecked(self.spec, acc)
    }

    /// `Re tr hol(w)`.
    pub fn trace_function(&self, w: &Word) -> f64 {
        liealg::invariant_f(&self.holonomy(w))
    }

    /// Frobenius distance of the relator's holonomy from the identity.
    pub fn relator_residual(&self) -> f64 {
        relator_defect(&self.images.iter().map(|g| g.matrix().clone()).collect::<Vec<_>>())
            .norm()
    }

    /// Global gauge transformation `rho -> h^-1 rho h`.
    pub fn conjugate(&self, h: &GroupElement) -> Result<Self> {
        let images = self
            .images
            .iter()
            .map(|g| g.conjugate_by(h))
            .collect::<Result<Vec<_>>>()?;
        Representation::new(self.spec, self.presentation, images)
    }
}

fn handle_holonomy(a: &CMat, b: &CMat) -> CMat {
    // hol(a b A B) = B^-1 A^-1 B A
    let nan = || CMat::from_element(a.nrows(), a.ncols(), f64::NAN.into());
    let a_inv = a.clone().try_inverse().unwrap_or_else(nan);
    let b_inv = b.clone().try_inverse().unwrap_or_else(nan);
    b_inv * a_inv * b * a
}

/// `hol(relator) - I` for generator images in the order `a_1, b_1, a_2, ...`.
fn relator_defect(images: &[CMat]) -> CMat {
    let n = images[0].nrows();
    let mut acc = linalg::identity(n);
    for pair in images.chunks(2) {
        acc = handle_holonomy(&pair[0], &pair[1]) * acc;
    }
    acc - linalg::identity(n)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SampleMode {
    Random,
    Trivial,
}

/// Two commuting elements `exp(x)`, `exp(y)` with `y` in the centraliser of `x`.
fn commuting_pair(basis: &AlgebraBasis, rng: &mut impl Rng) -> (GroupElement, GroupElement) {
    let x = basis.random(rng, liealg::RANDOM_SCALE);
    let columns: Vec<DVector<f64>> = basis
        .elements()
        .iter()
        .map(|e| linalg::to_real_vec(&linalg::commutator(x.matrix(), e)))
        .collect();
    let ad = DMatrix::from_columns(&columns);
    let centraliser = linalg::kernel(&ad, basis.dim(), 1e-10);
    let mut coeffs = vec![0.0; basis.dim()];
    for col in centraliser.column_iter() {
        let t: f64 = rng.sample(rand_distr::StandardNormal);
        for (c, v) in coeffs.iter_mut().zip(col.iter()) {
            *c += liealg::RANDOM_SCALE * t * v;
        }
    }
    let y = basis.combine(&coeffs);
    (GroupElement::exp(&x), GroupElement::exp(&y))
}

fn right_exp(g: &CMat, basis: &AlgebraBasis, coords: &[f64], real: bool) -> CMat {
    let step = linalg::expm(basis.combine(coords).matrix());
    let out = g * step;
    if real {
        out.map(|z| linalg::c(z.re))
    } else {
        out
    }
}

/// Damped Gauss-Newton on `hol(relator) = I`, moving the last handle's images
/// along `g -> g exp(x)`. Returns the final residual.
fn solve_last_handle(basis: &AlgebraBasis, images: &mut [CMat]) -> Result<f64> {
    let real = basis.spec().kind().is_real();
    let m = basis.dim();
    let k = images.len() - 2;
    let residual_vec = |imgs: &[CMat]| linalg::to_real_vec(&relator_defect(imgs));
    let mut r = residual_vec(images);
    let mut norm = r.norm();
    let h = 1e-7;
    for iter in 0..NEWTON_MAX_ITER {
        if norm <= 1e-14 {
            return Ok(norm);
        }
        let mut jac = DMatrix::zeros(r.len(), 2 * m);
        for j in 0..2 * m {
            let mut coords = vec![0.0; m];
            let slot = k + j / m;
            coords[j % m] = h;
            let mut plus = images.to_vec();
            plus[slot] = right_exp(&images[slot], basis, &coords, real);
            coords[j % m] = -h;
            let mut minus = images.to_vec();
            minus[slot] = right_exp(&images[slot], basis, &coords, real);
            let col = (residual_vec(&plus) - residual_vec(&minus)) / (2.0 * h);
            jac.set_column(j, &col);
        }
        // Finite differences leave the degenerate directions at ~1e-9, not zero.
        let step = -linalg::lstsq(&jac, &r, 1e-6);
        let mut damping = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let scaled: Vec<f64> = step.iter().map(|s| s * damping).collect();
            let mut trial = images.to_vec();
            trial[k] = right_exp(&images[k], basis, &scaled[..m], real);
            trial[k + 1] = right_exp(&images[k + 1], basis, &scaled[m..], real);
            let tr = residual_vec(&trial);
            if tr.norm() < norm {
                images.clone_from_slice(&trial);
                r = tr;
                norm = r.norm();
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if !accepted {
            return if norm <= TAU_REP {
                Ok(norm)
            } else {
                Err(Error::SamplingFailure {
                    residual: norm,
                    iterations: iter,
                })
            };
        }
    }
    if norm <= TAU_REP {
        Ok(norm)
    } else {
        Err(Error::SamplingFailure {
            residual: norm,
            iterations: NEWTON_MAX_ITER,
        })
    }
}

/// Size of the random kick applied to the pinched starting configuration.
const KICK: f64 = 0.1;

/// Samples a representation deterministically from `seed`.
///
/// Genus 1 uses a commuting pair from a common one-parameter family and its
/// centraliser. For genus `g >= 2` handles are paired off so that the relator
/// holds exactly (`a_{2k} = b_{2k-1}`, `b_{2k} = a_{2k-1}`, with a commuting
/// first handle when `g` is odd), every image is then kicked by a random
/// `exp(x)`, and damped Newton restores the relator by moving the last handle.
pub fn sample_representation(
    spec: &GroupSpec,
    pres: &SurfacePresentation,
    seed: u64,
    mode: SampleMode,
) -> Result<Representation> {
    if mode == SampleMode::Trivial {
        return Ok(Representation::trivial(*spec, *pres));
    }
    let basis = AlgebraBasis::new(*spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let genus = pres.genus();
    let mut images: Vec<CMat> = Vec::with_capacity(2 * genus);
    let mut handle = 0;
    if genus % 2 == 1 {
        let (a, b) = commuting_pair(&basis, &mut rng);
        images.push(a.into_matrix());
        images.push(b.into_matrix());
        handle = 1;
    }
    while handle < genus {
        let a = liealg::random_element_with(&basis, &mut rng, liealg::RANDOM_SCALE);
        let b = liealg::random_element_with(&basis, &mut rng, liealg::RANDOM_SCALE);
        images.push(a.matrix().clone());
        images.push(b.matrix().clone());
        images.push(b.into_matrix());
        images.push(a.into_matrix());
        handle += 2;
    }
    if genus >= 2 {
        let real = spec.kind().is_real();
        for img in images.iter_mut() {
            let x = basis.random(&mut rng, KICK);
            let coords = basis.coordinates(x.matrix());
            *img = right_exp(img, &basis, &coords, real);
        }
        solve_last_handle(&basis, &mut images)?;
    }
    let images = images
        .into_iter()
        .map(|m| GroupElement::new_unchecked(*spec, m))
        .collect();
    let rep = Representation::new(*spec, *pres, images)?;
    let residual = rep.relator_residual();
    if residual > TAU_REP {
        return Err(Error::SamplingFailure {
            residual,
            iterations: NEWTON_MAX_ITER,
        });
    }
    Ok(rep)
}

/// Tries `seed, seed + 1, ...` until sampling succeeds (at most `attempts` times).
pub fn sample_representation_reseeding(
    spec: &GroupSpec,
    pres: &SurfacePresentation,
    seed: u64,
    attempts: usize,
) -> Result<Representation> {
    let mut last = None;
    for k in 0..attempts as u64 {
        match sample_representation(spec, pres, seed.wrapping_mul(7919).wrapping_add(k), SampleMode::Random) {
            Ok(rep) => return Ok(rep),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(Error::SamplingFailure {
        residual: f64::INFINITY,
        iterations: 0,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real, from_real_diag};
    use crate::tolerance::TAU_NUM;

    fn cyc(s: &str) -> Word {
        Word::parse(s, WordKind::Cyclic).unwrap()
    }

    fn diag_torus() -> Representation {
        let spec = GroupSpec::gl_r(2);
        let pres = SurfacePresentation::new(1).unwrap();
        let a = GroupElement::new(spec, from_real_diag(&[2.0, 0.5])).unwrap();
        let b = GroupElement::new(spec, from_real_diag(&[3.0, 1.0 / 3.0])).unwrap();
        Representation::new(spec, pres, vec![a, b]).unwrap()
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(Word::parse("a1 A1 b1", WordKind::Based).unwrap().reduce().to_string(), "b1");
        assert_eq!(cyc("b1 a1 B1").reduce().to_string(), "a1");
        assert_eq!(cyc("a1 b1").reduce().to_string(), "a1 b1");
        assert!(cyc("a1 A1").reduce().is_empty());
        assert_eq!(cyc("b1 a1 B1").canonical(), cyc("a1"));
        assert_eq!(cyc("b1 a1").canonical().to_string(), "a1 b1");
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let w = cyc("a1 B2 A1 b2");
        assert_eq!(w.to_string(), "a1 B2 A1 b2");
        assert!(Word::parse("c1", WordKind::Based).is_err());
        assert!(Word::parse("a0", WordKind::Based).is_err());
        let pres = SurfacePresentation::new(1).unwrap();
        assert!(pres.parse_word("a2", WordKind::Cyclic).is_err());
    }

    #[test]
    fn relator_and_moves() {
        let pres = SurfacePresentation::new(2).unwrap();
        assert_eq!(pres.relator().to_string(), "a1 b1 A1 B1 a2 b2 A2 B2");
        let a = cyc("a1");
        assert_eq!(homotopy_moves(&a, &pres, 99, 0), a);
        let moved = apply_move(&a, &pres, HomotopyMove::Conjugate(Letter::b(1)));
        assert_eq!(moved.to_string(), "b1 a1 B1");
    }

    #[test]
    fn holonomy_examples() {
        let rho = diag_torus();
        assert_eq!(rho.holonomy(&Word::empty(WordKind::Based)).matrix(), &linalg::identity(2));
        let ab = rho.holonomy(&cyc("a1 b1"));
        assert!((ab.matrix() - from_real_diag(&[6.0, 1.0 / 6.0])).norm() < 1e-15);
        let rel = rho.holonomy(&SurfacePresentation::new(1).unwrap().relator());
        assert!((rel.matrix() - linalg::identity(2)).norm() < 1e-15);
        assert_eq!(rho.trace_function(&cyc("a1")), 2.5);
        assert!((rho.trace_function(&cyc("a1 b1")) - (6.0 + 1.0 / 6.0)).abs() < 1e-14);
        assert_eq!(rho.trace_function(&Word::empty(WordKind::Cyclic)), 2.0);
    }

    #[test]
    fn holonomy_is_an_antihomomorphism() {
        let spec = GroupSpec::gl_c(2);
        let pres = SurfacePresentation::new(2).unwrap();
        let rho = sample_representation(&spec, &pres, 3, SampleMode::Random).unwrap();
        let u = cyc("a1 b2 B1");
        let v = cyc("A2 b1");
        let lhs = rho.holonomy(&u.concat(&v));
        let rhs = rho.holonomy(&v).mul(&rho.holonomy(&u));
        assert!((lhs.matrix() - rhs.matrix()).norm() <= TAU_NUM * (1.0 + lhs.matrix().norm()));
    }

    #[test]
    fn relator_residual_examples() {
        assert_eq!(diag_torus().relator_residual(), 0.0);
        let pres = SurfacePresentation::new(2).unwrap();
        assert_eq!(Representation::trivial(GroupSpec::gl_r(2), pres).relator_residual(), 0.0);

        let spec = GroupSpec::gl_r(2);
        let a = GroupElement::new(spec, from_real(2, 2, &[1., 1., 0., 1.])).unwrap();
        let b = GroupElement::new(spec, from_real(2, 2, &[1., 0., 1., 0.999])).unwrap();
        let rho = Representation::new(spec, SurfacePresentation::new(1).unwrap(), vec![a, b]).unwrap();
        assert!(rho.relator_residual() > 0.1);
    }

    #[test]
    fn sampled_genus_one_commutes() {
        let pres = SurfacePresentation::new(1).unwrap();
        let rho = sample_representation(&GroupSpec::gl_r(2), &pres, 3, SampleMode::Random).unwrap();
        assert!(rho.relator_residual() <= 1e-12);
        let again = sample_representation(&GroupSpec::gl_r(2), &pres, 3, SampleMode::Random).unwrap();
        assert_eq!(rho.images(), again.images());
        let trivial = sample_representation(&GroupSpec::u(2), &pres, 3, SampleMode::Trivial).unwrap();
        assert!(trivial.images().iter().all(|g| g.matrix() == &linalg::identity(2)));
    }

    #[test]
    fn newton_sampling_succeeds_across_kinds() {
        let specs = [
            GroupSpec::gl_r(2),
            GroupSpec::gl_c(2),
            GroupSpec::sp_r(2),
            GroupSpec::u(2),
            GroupSpec::o(2),
            GroupSpec::o_pq(1, 1),
            GroupSpec::o_c(2),
            GroupSpec::sp_pq(1, 0),
        ];
        for genus in [2, 3] {
            let pres = SurfacePresentation::new(genus).unwrap();
            for spec in specs {
                let mut ok = 0;
                for seed in 0..10 {
                    if let Ok(rho) = sample_representation(&spec, &pres, seed, SampleMode::Random) {
                        assert!(rho.relator_residual() <= TAU_REP);
                        ok += 1;
                    }
                }
                assert!(ok >= 5, "{spec} genus {genus}: {ok}/10");
            }
        }
        let rho = sample_representation(&GroupSpec::sp_r(2), &SurfacePresentation::new(2).unwrap(), 5, SampleMode::Random)
            .unwrap();
        assert!(rho.relator_residual() <= 1e-9);
    }

    #[test]
    fn trace_is_invariant_under_moves_and_gauge() {
        let pres = SurfacePresentation::new(2).unwrap();
        let spec = GroupSpec::gl_r(2);
        let rho = sample_representation_reseeding(&spec, &pres, 1, 8).unwrap();
        let h = liealg::random_element(&spec, 77);
        let rho_h = rho.conjugate(&h).unwrap();
        let w = cyc("a1 b2 A1 b1 B2");
        let base = rho.trace_function(&w);
        for seed in 0..20 {
            let moved = homotopy_moves(&w, &pres, seed, 6);
            let t = rho.trace_function(&moved);
            assert!((t - base).abs() <= TAU_NUM * (1.0 + base.abs()), "seed {seed}: {t} vs {base}");
        }
        assert!((rho_h.trace_function(&w) - base).abs() <= TAU_NUM * (1.0 + base.abs()));
    }
}
