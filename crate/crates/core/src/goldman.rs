//! Goldman brackets of free homotopy classes of loops.
//!
//! Loops are drawn in the fundamental `4g`-gon whose boundary reads
//! `a_1 b_1 A_1 B_1 ... a_g b_g A_g B_g`. Side `k` runs from vertex `k` to
//! vertex `k + 1`, vertices are placed clockwise, and each side is glued to
//! its partner so that parameter `s` meets parameter `1 - s`. Leaving through
//! the side labelled `a_i` (and coming back through `A_i`) reads the letter
//! `a_i`; leaving through `B_i` (back through `b_i`) reads `b_i`. With this
//! naming a small loop around the single vertex reads the relator.
//!
//! Inside the polygon a loop is a chain of straight chords, so two loops meet
//! exactly where two of their chords have interleaved endpoints on the
//! boundary.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::liealg::{self, GroupKind};
use crate::surface::{Letter, Representation, SurfacePresentation, Word, WordKind};
use crate::tolerance::{PERTURBATION, RETRY_BUDGET};

pub type Point = [f64; 2];

/// Minimal separation (relative to the circumradius) for generic position.
const GENERIC_TOL: f64 = 1e-9;

/// The fundamental polygon of the genus `g` surface.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    genus: usize,
    vertices: Vec<Point>,
    circumradius: f64,
}

impl Polygon {
    /// The unit square for genus 1, otherwise the regular `4g`-gon of
    /// circumradius 1 centred at the origin.
    pub fn new(genus: usize) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidSpec("genus must be at least 1".into()));
        }
        if genus == 1 {
            return Ok(Polygon {
                genus,
                vertices: vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]],
                circumradius: FRAC_1_SQRT_2,
            });
        }
        let sides = 4 * genus;
        let start = PI + PI / sides as f64;
        let vertices = (0..sides)
            .map(|k| {
                let t = start - 2.0 * PI * k as f64 / sides as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        Ok(Polygon {
            genus,
            vertices,
            circumradius: 1.0,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn circumradius(&self) -> f64 {
        self.circumradius
    }

    pub fn num_sides(&self) -> usize {
        self.vertices.len()
    }

    /// The boundary label of side `k`.
    pub fn side_label(&self, side: usize) -> Letter {
        let handle = (side / 4 + 1) as u32;
        match side % 4 {
            0 => Letter::a(handle),
            1 => Letter::b(handle),
            2 => Letter::a(handle).inverse(),
            _ => Letter::b(handle).inverse(),
        }
    }

    pub fn side_length(&self, side: usize) -> f64 {
        let p = self.vertices[side];
        let q = self.vertices[(side + 1) % self.num_sides()];
        (q[0] - p[0]).hypot(q[1] - p[1])
    }

    pub fn point(&self, b: BoundaryPoint) -> Point {
        let p = self.vertices[b.side];
        let q = self.vertices[(b.side + 1) % self.num_sides()];
        [p[0] + b.s * (q[0] - p[0]), p[1] + b.s * (q[1] - p[1])]
    }
}

/// A point on side `side` at parameter `s` in `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub side: usize,
    pub s: f64,
}

impl BoundaryPoint {
    /// Position along the whole boundary, in `[0, 4g)`.
    pub fn coordinate(self) -> f64 {
        self.side as f64 + self.s
    }
}

/// Outgoing and returning side for a positive generator.
fn generator_sides(letter: Letter) -> (usize, usize) {
    let base = 4 * (letter.handle() - 1);
    if letter.is_a() {
        (base, base + 2)
    } else {
        (base + 3, base + 1)
    }
}

/// Exit and entry points when `letter` is crossed at slot `s`. Slots are
/// measured on the outgoing side of the positive generator.
fn crossing(letter: Letter, s: f64) -> (BoundaryPoint, BoundaryPoint) {
    let (out, back) = generator_sides(letter);
    let exit = BoundaryPoint { side: out, s };
    let entry = BoundaryPoint { side: back, s: 1.0 - s };
    if letter.is_inverse() {
        (entry, exit)
    } else {
        (exit, entry)
    }
}

/// A straight piece of a loop inside the polygon.
#[derive(Clone, Copy, Debug)]
pub struct Chord {
    pub from: BoundaryPoint,
    pub to: BoundaryPoint,
    pub start: Point,
    pub end: Point,
}

impl Chord {
    fn direction(&self) -> Point {
        [self.end[0] - self.start[0], self.end[1] - self.start[1]]
    }

    fn interleaves(&self, other: &Chord) -> bool {
        let (u1, u2) = (self.from.coordinate(), self.to.coordinate());
        let (lo, hi) = if u1 < u2 { (u1, u2) } else { (u2, u1) };
        let inside = |v: f64| lo < v && v < hi;
        inside(other.from.coordinate()) != inside(other.to.coordinate())
    }

    fn distance_to(&self, p: Point) -> f64 {
        let d = self.direction();
        let len2 = d[0] * d[0] + d[1] * d[1];
        let t = (((p[0] - self.start[0]) * d[0] + (p[1] - self.start[1]) * d[1]) / len2).clamp(0.0, 1.0);
        let q = [self.start[0] + t * d[0], self.start[1] + t * d[1]];
        (p[0] - q[0]).hypot(p[1] - q[1])
    }
}

fn cross(u: Point, v: Point) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

/// A piecewise-linear loop in the polygon. Chord `j` joins the entry point of
/// letter `j - 1` to the exit point of letter `j`, so the crossing sequence
/// spells the word.
#[derive(Clone, Debug)]
pub struct PLLoop {
    word: Word,
    slots: Vec<f64>,
    polygon: Polygon,
}

impl PLLoop {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    /// Crossing slot of each letter, on the outgoing side of its generator.
    pub fn slots(&self) -> &[f64] {
        &self.slots
    }

    pub fn chords(&self) -> Vec<Chord> {
        let letters = self.word.letters();
        let n = letters.len();
        (0..n)
            .map(|j| {
                let prev = (j + n - 1) % n;
                let (_, from) = crossing(letters[prev], self.slots[prev]);
                let (to, _) = crossing(letters[j], self.slots[j]);
                Chord {
                    from,
                    to,
                    start: self.polygon.point(from),
                    end: self.polygon.point(to),
                }
            })
            .collect()
    }
}

/// One transversal crossing of two loops.
#[derive(Clone, Debug)]
pub struct IntersectionDatum {
    pub point: Point,
    /// `+1` when `(gamma', lambda')` is a positively oriented frame.
    pub sign: i32,
    /// The first loop read from the crossing point.
    pub gamma_p: Word,
    /// The second loop read from the crossing point.
    pub lambda_p: Word,
}

fn prepare(w: &Word, pres: &SurfacePresentation) -> Result<Word> {
    if !pres.contains(w) {
        return Err(Error::InvalidSpec(format!(
            "word {w} does not fit in genus {}",
            pres.genus()
        )));
    }
    Ok(w.clone().with_kind(WordKind::Cyclic).reduce())
}

/// Spreads the crossings of every generator evenly over its side, in a
/// seeded random order, with a small seeded jitter.
fn assign_slots(words: &[&Word], polygon: &Polygon, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut slots: Vec<Vec<f64>> = words.iter().map(|w| vec![0.0; w.len()]).collect();
    let mut by_generator: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (wi, w) in words.iter().enumerate() {
        for (li, l) in w.letters().iter().enumerate() {
            by_generator.entry(l.generator()).or_default().push((wi, li));
        }
    }
    for (gen, mut occurrences) in by_generator {
        occurrences.shuffle(rng);
        let side = generator_sides(Letter::new(gen as i32)).0;
        let jitter = PERTURBATION * polygon.circumradius() / polygon.side_length(side);
        let m = occurrences.len() as f64;
        for (r, (wi, li)) in occurrences.into_iter().enumerate() {
            let base = (r as f64 + 1.0) / (m + 1.0);
            slots[wi][li] = base + jitter * rng.random_range(-1.0..1.0);
        }
    }
    slots
}

fn slots_are_generic(loops: &[&PLLoop]) -> bool {
    let mut by_generator: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for c in loops {
        for (l, &s) in c.word.letters().iter().zip(&c.slots) {
            by_generator.entry(l.generator()).or_default().push(s);
        }
    }
    by_generator.into_values().all(|mut v| {
        v.sort_by(f64::total_cmp);
        v.iter().all(|&s| s > GENERIC_TOL && s < 1.0 - GENERIC_TOL)
            && v.windows(2).all(|w| w[1] - w[0] > GENERIC_TOL)
    })
}

/// A representative of the cyclic word `w` in generic position.
pub fn realize(w: &Word, pres: &SurfacePresentation, seed: u64) -> Result<PLLoop> {
    let word = prepare(w, pres)?;
    let polygon = Polygon::new(pres.genus())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RETRY_BUDGET {
        let slots = assign_slots(&[&word], &polygon, &mut rng).remove(0);
        let c = PLLoop {
            word: word.clone(),
            slots,
            polygon: polygon.clone(),
        };
        if slots_are_generic(&[&c]) {
            return Ok(c);
        }
    }
    Err(Error::Realization {
        retries: RETRY_BUDGET,
    })
}

/// Transversal crossings of two loops drawn in the same polygon. Fails if the
/// pair is not in generic position.
pub fn intersections(c1: &PLLoop, c2: &PLLoop) -> Result<Vec<IntersectionDatum>> {
    let not_generic = Error::Realization { retries: 0 };
    if c1.polygon != c2.polygon || !slots_are_generic(&[c1, c2]) {
        return Err(not_generic);
    }
    let tol = GENERIC_TOL * c1.polygon.circumradius();
    let ch1 = c1.chords();
    let ch2 = c2.chords();
    let mut data = Vec::new();
    for (j, x) in ch1.iter().enumerate() {
        for (k, y) in ch2.iter().enumerate() {
            if !x.interleaves(y) {
                continue;
            }
            let (dx, dy) = (x.direction(), y.direction());
            let det = cross(dx, dy);
            if det.abs() <= tol * tol {
                return Err(not_generic);
            }
            let t = cross([y.start[0] - x.start[0], y.start[1] - x.start[1]], dy) / det;
            let point = [x.start[0] + t * dx[0], x.start[1] + t * dx[1]];
            let crowded = ch1
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, c)| c)
                .chain(ch2.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, c)| c))
                .any(|c| c.distance_to(point) <= tol);
            if crowded {
                return Err(not_generic);
            }
            data.push(IntersectionDatum {
                point,
                sign: if det > 0.0 { 1 } else { -1 },
                gamma_p: c1.word.rotate(j).with_kind(WordKind::Based),
                lambda_p: c2.word.rotate(k).with_kind(WordKind::Based),
            });
        }
    }
    Ok(data)
}

/// Realizes `gamma` and `lambda` together in generic position and returns
/// both loops with their crossings.
pub fn realize_pair(
    gamma: &Word,
    lambda: &Word,
    pres: &SurfacePresentation,
    seed: u64,
) -> Result<(PLLoop, PLLoop, Vec<IntersectionDatum>)> {
    let gamma = prepare(gamma, pres)?;
    let lambda = prepare(lambda, pres)?;
    let polygon = Polygon::new(pres.genus())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RETRY_BUDGET {
        let mut slots = assign_slots(&[&gamma, &lambda], &polygon, &mut rng);
        let c2 = PLLoop {
            word: lambda.clone(),
            slots: slots.pop().expect("two loops"),
            polygon: polygon.clone(),
        };
        let c1 = PLLoop {
            word: gamma.clone(),
            slots: slots.pop().expect("two loops"),
            polygon: polygon.clone(),
        };
        if let Ok(data) = intersections(&c1, &c2) {
            return Ok((c1, c2, data));
        }
    }
    Err(Error::Realization {
        retries: RETRY_BUDGET,
    })
}

/// A coefficient in `(1/2) Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Coefficient {
    halves: i64,
}

impl Coefficient {
    pub fn from_halves(halves: i64) -> Self {
        Coefficient { halves }
    }

    pub fn integer(n: i64) -> Self {
        Coefficient { halves: 2 * n }
    }

    pub fn halves(self) -> i64 {
        self.halves
    }

    pub fn value(self) -> f64 {
        self.halves as f64 / 2.0
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.halves % 2 == 0 {
            write!(f, "{}", self.halves / 2)
        } else {
            write!(f, "{}/2", self.halves)
        }
    }
}

impl FromStr for Coefficient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad coefficient {s:?}"));
        match s.trim().split_once('/') {
            None => s.trim().parse::<i64>().map(Coefficient::integer).map_err(|_| bad()),
            Some((num, "2")) => num.trim().parse::<i64>().map(Coefficient::from_halves).map_err(|_| bad()),
            Some((num, "1")) => num.trim().parse::<i64>().map(Coefficient::integer).map_err(|_| bad()),
            Some(_) => Err(bad()),
        }
    }
}

/// A finite combination of free homotopy classes with coefficients in
/// `(1/2) Z`. Words are stored in canonical cyclic form, so cyclically equal
/// words merge; conjugate words that are not cyclically equal stay apart.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoopSum {
    terms: BTreeMap<Word, i64>,
}

impl LoopSum {
    pub fn zero() -> Self {
        LoopSum::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: &Word, c: Coefficient) {
        if c.halves == 0 {
            return;
        }
        let key = w.canonical();
        let entry = self.terms.entry(key.clone()).or_insert(0);
        *entry += c.halves;
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn add(&mut self, other: &LoopSum) {
        for (w, c) in other.terms() {
            self.add_term(w, c);
        }
    }

    pub fn negate(&self) -> LoopSum {
        LoopSum {
            terms: self.terms.iter().map(|(w, &h)| (w.clone(), -h)).collect(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, Coefficient)> {
        self.terms.iter().map(|(w, &h)| (w, Coefficient::from_halves(h)))
    }

    /// Image under orientation reversal of every loop.
    pub fn reversed(&self) -> LoopSum {
        let mut out = LoopSum::zero();
        for (w, c) in self.terms() {
            out.add_term(&w.inverse(), c);
        }
        out
    }
}

impl fmt::Display for LoopSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms().map(|(w, c)| format!("{c}*({w})")).collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    coef: String,
    word: String,
}

impl Serialize for LoopSum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw: Vec<RawTerm> = self
            .terms()
            .map(|(w, c)| RawTerm {
                coef: c.to_string(),
                word: w.to_string(),
            })
            .collect();
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LoopSum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = Vec::<RawTerm>::deserialize(deserializer)?;
        let mut out = LoopSum::zero();
        for t in raw {
            let c: Coefficient = t.coef.parse().map_err(D::Error::custom)?;
            let w = Word::parse(&t.word, WordKind::Cyclic).map_err(D::Error::custom)?;
            out.add_term(&w, c);
        }
        Ok(out)
    }
}

/// Which bracket formula to apply at each crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketKind {
    /// `eps * gamma_p lambda_p`.
    Oriented,
    /// `eps/2 * (gamma_p lambda_p - gamma_p lambda_p^-1)`.
    Unoriented,
}

impl BracketKind {
    /// The bracket whose trace functions close under the Poisson bracket for
    /// this group: oriented for `GL`, unoriented otherwise.
    pub fn for_group(kind: GroupKind) -> Self {
        if kind.is_general_linear() {
            BracketKind::Oriented
        } else {
            BracketKind::Unoriented
        }
    }
}

pub fn bracket_from_data(kind: BracketKind, data: &[IntersectionDatum]) -> LoopSum {
    let mut out = LoopSum::zero();
    for d in data {
        let eps = i64::from(d.sign);
        match kind {
            BracketKind::Oriented => {
                out.add_term(&d.gamma_p.concat(&d.lambda_p), Coefficient::integer(eps));
            }
            BracketKind::Unoriented => {
                out.add_term(&d.gamma_p.concat(&d.lambda_p), Coefficient::from_halves(eps));
                out.add_term(&d.gamma_p.concat(&d.lambda_p.inverse()), Coefficient::from_halves(-eps));
            }
        }
    }
    out
}

pub fn bracket(
    kind: BracketKind,
    gamma: &Word,
    lambda: &Word,
    pres: &SurfacePresentation,
    seed: u64,
) -> Result<LoopSum> {
    let (_, _, data) = realize_pair(gamma, lambda, pres, seed)?;
    Ok(bracket_from_data(kind, &data))
}

pub fn bracket_oriented(gamma: &Word, lambda: &Word, pres: &SurfacePresentation, seed: u64) -> Result<LoopSum> {
    bracket(BracketKind::Oriented, gamma, lambda, pres, seed)
}

pub fn bracket_unoriented(gamma: &Word, lambda: &Word, pres: &SurfacePresentation, seed: u64) -> Result<LoopSum> {
    bracket(BracketKind::Unoriented, gamma, lambda, pres, seed)
}

/// Sum of coefficient times trace function.
pub fn evaluate(s: &LoopSum, rho: &Representation) -> f64 {
    s.terms().map(|(w, c)| c.value() * rho.trace_function(w)).sum()
}

/// The Poisson bracket of the trace functions of `gamma` and `lambda` at `rho`,
/// summed directly over crossings as `eps <F(H_gamma), F(H_lambda)>`.
pub fn poisson_direct(gamma: &Word, lambda: &Word, rho: &Representation, seed: u64) -> Result<f64> {
    let (_, _, data) = realize_pair(gamma, lambda, rho.presentation(), seed)?;
    poisson_from_data(&data, rho)
}

pub fn poisson_from_data(data: &[IntersectionDatum], rho: &Representation) -> Result<f64> {
    let mut total = 0.0;
    for d in data {
        let fg = liealg::variation(&rho.holonomy(&d.gamma_p))?;
        let fl = liealg::variation(&rho.holonomy(&d.lambda_p))?;
        total += f64::from(d.sign) * liealg::pairing(&fg, &fl)?;
    }
    Ok(total)
}

/// `evaluate([gamma, s], rho)`, extended linearly over the terms of `s`.
pub fn evaluate_bracket_with(
    kind: BracketKind,
    gamma: &Word,
    s: &LoopSum,
    rho: &Representation,
    seed: u64,
) -> Result<f64> {
    let mut total = 0.0;
    for (w, c) in s.terms() {
        let b = bracket(kind, gamma, w, rho.presentation(), seed)?;
        total += c.value() * evaluate(&b, rho);
    }
    Ok(total)
}

/// `evaluate([gamma, lambda] + [lambda, gamma], rho)`.
pub fn antisymmetry_residual(
    kind: BracketKind,
    gamma: &Word,
    lambda: &Word,
    rho: &Representation,
    seed: u64,
) -> Result<f64> {
    let pres = rho.presentation();
    let mut s = bracket(kind, gamma, lambda, pres, seed)?;
    s.add(&bracket(kind, lambda, gamma, pres, seed.wrapping_add(1))?);
    Ok(evaluate(&s, rho))
}

/// The cyclic Jacobi sum `[g,[l,m]] + [l,[m,g]] + [m,[g,l]]`, evaluated at `rho`.
pub fn jacobi_residual(
    kind: BracketKind,
    gamma: &Word,
    lambda: &Word,
    mu: &Word,
    rho: &Representation,
    seed: u64,
) -> Result<f64> {
    let pres = rho.presentation();
    let mut total = 0.0;
    for (x, y, z) in [(gamma, lambda, mu), (lambda, mu, gamma), (mu, gamma, lambda)] {
        let inner = bracket(kind, y, z, pres, seed)?;
        total += evaluate_bracket_with(kind, x, &inner, rho, seed.wrapping_add(1))?;
    }
    Ok(total)
}

/// The straight loop of homology class `(p, q)` on the torus, read as its
/// cutting sequence (`a_1` for each vertical side crossed, `b_1` for each
/// horizontal one).
pub fn torus_word(p: i64, q: i64) -> Word {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let d = gcd(p.abs(), q.abs());
    if d == 0 {
        return Word::empty(WordKind::Cyclic);
    }
    let (pp, qq) = (p / d, q / d);
    // Irrational offsets keep the two families of crossing times disjoint.
    let (alpha, beta) = (0.271_828_182_8, 0.577_215_664_9);
    let a = if pp > 0 { Letter::a(1) } else { Letter::a(1).inverse() };
    let b = if qq > 0 { Letter::b(1) } else { Letter::b(1).inverse() };
    let mut events: Vec<(f64, Letter)> = Vec::new();
    for k in 1..=pp.abs() {
        events.push(((k as f64 - alpha) / pp.abs() as f64, a));
    }
    for l in 1..=qq.abs() {
        events.push(((l as f64 - beta) / qq.abs() as f64, b));
    }
    events.sort_by(|x, y| x.0.total_cmp(&y.0));
    let primitive: Vec<Letter> = events.into_iter().map(|(_, l)| l).collect();
    Word::cyclic(primitive.repeat(d as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{GroupElement, GroupSpec};
    use crate::linalg::{from_real, from_real_diag};
    use crate::surface::{homotopy_moves, random_cyclic_word, sample_representation, SampleMode};
    use crate::tolerance::TAU_NUM;

    fn torus() -> SurfacePresentation {
        SurfacePresentation::new(1).unwrap()
    }

    fn cyc(s: &str) -> Word {
        Word::parse(s, WordKind::Cyclic).unwrap()
    }

    fn diag_torus() -> Representation {
        let spec = GroupSpec::gl_r(2);
        let a = GroupElement::new(spec, from_real_diag(&[2.0, 0.5])).unwrap();
        let b = GroupElement::new(spec, from_real_diag(&[3.0, 1.0 / 3.0])).unwrap();
        Representation::new(spec, torus(), vec![a, b]).unwrap()
    }

    fn rotation(t: f64) -> GroupElement {
        GroupElement::new(GroupSpec::o(2), from_real(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()])).unwrap()
    }

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() <= 1e-8 * (1.0 + x.abs().max(y.abs()))
    }

    #[test]
    fn boundary_reads_relator_around_vertex() {
        // Walking around the vertex we leave through side k and come back
        // near the start of the side after its partner.
        for genus in 1..=3 {
            let poly = Polygon::new(genus).unwrap();
            let pres = SurfacePresentation::new(genus).unwrap();
            let partner = |k: usize| match k % 4 {
                0 => k + 2,
                2 => k - 2,
                1 => k + 2,
                _ => k - 2,
            };
            let mut side = 0;
            let mut read = Vec::new();
            for _ in 0..4 * genus {
                let l = poly.side_label(side);
                // Leaving through a side labelled `a` reads `a`; through `B` reads `b`.
                let letter = if l.is_a() { l } else { l.inverse() };
                assert_eq!(crossing(letter, 0.3).0.side, side);
                read.push(letter);
                side = (partner(side) + 1) % (4 * genus);
            }
            assert_eq!(side, 0);
            assert_eq!(Word::based(read), pres.relator());
        }
    }

    #[test]
    fn realize_examples() {
        let c = realize(&cyc("a1"), &torus(), 0).unwrap();
        let ch = c.chords();
        assert_eq!(ch.len(), 1);
        assert_eq!((ch[0].from.side, ch[0].to.side), (2, 0));
        // Glued sides at equal height: the chord is horizontal.
        assert!((ch[0].start[1] - ch[0].end[1]).abs() < 1e-15);

        let g2 = SurfacePresentation::new(2).unwrap();
        let c = realize(&cyc("a1"), &g2, 0).unwrap();
        assert_eq!(c.chords().len(), 1);

        let w = torus_word(2, 3);
        assert_eq!(w.len(), 5);
        assert_eq!(w.exponent_sums(1), vec![2, 3]);
        assert_eq!(torus_word(-2, 4).exponent_sums(1), vec![-2, 4]);
        assert!(torus_word(0, 0).is_empty());
    }

    #[test]
    fn torus_a_b_crossing_is_positive() {
        let (_, _, data) = realize_pair(&cyc("a1"), &cyc("b1"), &torus(), 4).unwrap();
        assert_eq!(data.len(), 1);
        assert_eq!(data[0].sign, 1);
        let (_, _, data) = realize_pair(&cyc("a1"), &cyc("a1"), &torus(), 4).unwrap();
        assert!(data.is_empty());
        let (_, _, data) = realize_pair(&torus_word(1, 0), &torus_word(1, 1), &torus(), 9).unwrap();
        assert_eq!(data.iter().map(|d| d.sign).sum::<i32>(), 1);
    }

    #[test]
    fn bracket_examples() {
        let b = bracket_oriented(&cyc("a1"), &cyc("b1"), &torus(), 1).unwrap();
        assert_eq!(b.to_string(), "1*(a1 b1)");
        let b = bracket_oriented(&torus_word(1, 0), &torus_word(2, 0), &torus(), 1).unwrap();
        assert!(b.is_zero());
        let u = bracket_unoriented(&cyc("a1"), &cyc("b1"), &torus(), 1).unwrap();
        assert_eq!(u.to_string(), "1/2*(a1 b1) + -1/2*(a1 B1)");
        let u = bracket_unoriented(&cyc("a1 b1"), &cyc("a1 b1"), &torus(), 1).unwrap();
        assert_eq!(evaluate(&u, &diag_torus()), 0.0);
        let json = serde_json::to_string(&u).unwrap();
        assert_eq!(json, "[]");
        let u = bracket_unoriented(&cyc("a1"), &cyc("b1"), &torus(), 1).unwrap();
        let json = serde_json::to_string(&u).unwrap();
        assert_eq!(json, r#"[{"coef":"1/2","word":"a1 b1"},{"coef":"-1/2","word":"a1 B1"}]"#);
        assert_eq!(serde_json::from_str::<LoopSum>(&json).unwrap(), u);
    }

    #[test]
    fn evaluate_examples() {
        let rho = diag_torus();
        assert_eq!(evaluate(&LoopSum::zero(), &rho), 0.0);
        let mut s = LoopSum::zero();
        s.add_term(&cyc("a1 b1"), Coefficient::integer(1));
        assert!((evaluate(&s, &rho) - (6.0 + 1.0 / 6.0)).abs() < 1e-14);
        s.add_term(&cyc("b1 a1"), Coefficient::integer(-1));
        assert!(s.is_zero());
        assert_eq!("3/2".parse::<Coefficient>().unwrap().value(), 1.5);
        assert_eq!("-2".parse::<Coefficient>().unwrap().to_string(), "-2");
        assert!("1/3".parse::<Coefficient>().is_err());
    }

    #[test]
    fn poisson_direct_examples() {
        let rho = diag_torus();
        let v = poisson_direct(&cyc("a1"), &cyc("b1"), &rho, 0).unwrap();
        assert!((v - (6.0 + 1.0 / 6.0)).abs() < 1e-12);
        assert_eq!(poisson_direct(&cyc("a1"), &cyc("a1"), &rho, 0).unwrap(), 0.0);

        let (t, f) = (0.7, -1.3);
        let rho = Representation::new(GroupSpec::o(2), torus(), vec![rotation(t), rotation(f)]).unwrap();
        let v = poisson_direct(&cyc("a1"), &cyc("b1"), &rho, 0).unwrap();
        let expect = 0.5 * (2.0 * (t + f).cos() - 2.0 * (t - f).cos());
        assert!((v - expect).abs() < 1e-12);
        let u = bracket_unoriented(&cyc("a1"), &cyc("b1"), &torus(), 0).unwrap();
        assert!((evaluate(&u, &rho) - expect).abs() < 1e-12);
    }

    #[test]
    fn torus_closed_form_small() {
        let pres = torus();
        for seed in 0..3 {
            let rho = sample_representation(&GroupSpec::gl_r(2), &pres, seed, SampleMode::Random).unwrap();
            for (p, q, r, s) in [(1, 0, 0, 1), (2, 1, -1, 3), (3, -2, 1, 1), (0, 2, 2, 0), (1, 1, 2, 2)] {
                let b = bracket_oriented(&torus_word(p, q), &torus_word(r, s), &pres, seed).unwrap();
                let lhs = evaluate(&b, &rho);
                let rhs = (p * s - q * r) as f64 * rho.trace_function(&torus_word(p + r, q + s));
                assert!(close(lhs, rhs), "({p},{q}),({r},{s}): {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn homomorphism_genus_two() {
        let pres = SurfacePresentation::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (i, spec) in [GroupSpec::gl_r(2), GroupSpec::o(2), GroupSpec::u(2), GroupSpec::sp_r(2)].iter().enumerate() {
            let rho = sample_representation(spec, &pres, i as u64, SampleMode::Random).unwrap();
            let kind = BracketKind::for_group(spec.kind());
            for t in 0..5 {
                let g = random_cyclic_word(&pres, 6, &mut rng);
                let l = random_cyclic_word(&pres, 6, &mut rng);
                let b = bracket(kind, &g, &l, &pres, t).unwrap();
                let direct = poisson_direct(&g, &l, &rho, t).unwrap();
                assert!(close(evaluate(&b, &rho), direct));
            }
        }
    }

    #[test]
    fn representative_independence() {
        let pres = SurfacePresentation::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = sample_representation(&GroupSpec::gl_c(2), &pres, 2, SampleMode::Random).unwrap();
        for t in 0..4 {
            let g = random_cyclic_word(&pres, 5, &mut rng);
            let l = random_cyclic_word(&pres, 5, &mut rng);
            let reference = evaluate(&bracket_oriented(&g, &l, &pres, 0).unwrap(), &rho);
            for k in 0..5u64 {
                let g2 = homotopy_moves(&g, &pres, 100 * t + k, 3);
                let l2 = homotopy_moves(&l, &pres, 200 * t + k, 3);
                let v = evaluate(&bracket_oriented(&g2, &l2, &pres, k + 1).unwrap(), &rho);
                assert!(close(v, reference), "{g} {l} vs {g2} {l2}: {v} {reference}");
            }
        }
    }

    #[test]
    fn antisymmetry_jacobi_and_reversal() {
        let pres = SurfacePresentation::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for spec in [GroupSpec::gl_r(2), GroupSpec::o_pq(1, 1)] {
            let rho = sample_representation(&spec, &pres, 4, SampleMode::Random).unwrap();
            let kind = BracketKind::for_group(spec.kind());
            for t in 0..3 {
                let g = random_cyclic_word(&pres, 4, &mut rng);
                let l = random_cyclic_word(&pres, 4, &mut rng);
                let m = random_cyclic_word(&pres, 4, &mut rng);
                let scale = 1.0 + evaluate(&bracket(kind, &g, &l, &pres, t).unwrap(), &rho).abs();
                assert!(antisymmetry_residual(kind, &g, &l, &rho, t).unwrap().abs() <= 1e-8 * scale);
                let j = jacobi_residual(kind, &g, &l, &m, &rho, t).unwrap();
                assert!(j.abs() <= 1e-8 * (1.0 + scale * scale), "jacobi {j}");

                let lhs = bracket(kind, &g, &l, &pres, t).unwrap().reversed();
                let rhs = bracket(kind, &g.inverse(), &l.inverse(), &pres, t).unwrap();
                let d = evaluate(&lhs, &rho) - evaluate(&rhs, &rho);
                assert!(d.abs() <= TAU_NUM * (1.0 + scale), "reversal {d}");
            }
        }
    }
}
