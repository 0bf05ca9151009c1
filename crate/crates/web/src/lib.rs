//! Browser bindings. Every export takes plain numbers and strings and returns
//! a JSON string; errors come back as a thrown string.

use loopbracket::chen::{
    exp_tail, perturbed_holonomy, perturbed_holonomy_rk4, picard_transport, random_path, rk4_transport,
    Perturbation, TransportSign,
};
use loopbracket::goldman::{self, BracketKind};
use loopbracket::io::num;
use loopbracket::liealg::AlgebraBasis;
use loopbracket::linalg;
use loopbracket::surface::{sample_representation_reseeding, WordKind};
use loopbracket::{GroupSpec, SurfacePresentation};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

type Out = Result<String, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn points(ps: impl IntoIterator<Item = [f64; 2]>) -> Value {
    ps.into_iter().map(|p| json!([num(p[0]), num(p[1])])).collect()
}

/// Bracket of two curves together with the drawing: polygon vertices, the
/// chords of both loops and the signed crossings.
pub fn bracket_json(genus: usize, gamma: &str, lambda: &str, unoriented: bool, seed: u64) -> Out {
    let pres = SurfacePresentation::new(genus).map_err(err)?;
    let g = pres.parse_word(gamma, WordKind::Cyclic).map_err(err)?.reduce();
    let l = pres.parse_word(lambda, WordKind::Cyclic).map_err(err)?.reduce();
    if g.is_empty() || l.is_empty() {
        return Err("both curves must be nontrivial".into());
    }
    let (c1, c2, data) = goldman::realize_pair(&g, &l, &pres, seed).map_err(err)?;
    let kind = if unoriented { BracketKind::Unoriented } else { BracketKind::Oriented };
    let sum = goldman::bracket_from_data(kind, &data);
    let chords = |c: &goldman::PLLoop| -> Value { c.chords().iter().map(|ch| points([ch.start, ch.end])).collect() };
    let labels: Vec<String> = (0..c1.polygon().num_sides()).map(|s| c1.polygon().side_label(s).name()).collect();
    Ok(json!({
        "gamma": g.to_string(),
        "lambda": l.to_string(),
        "bracket": sum,
        "polygon": points(c1.polygon().vertices().iter().copied()),
        "sides": labels,
        "gamma_chords": chords(&c1),
        "lambda_chords": chords(&c2),
        "crossings": data.iter().map(|d| json!({
            "point": points([d.point])[0],
            "sign": d.sign,
            "gamma_p": d.gamma_p.to_string(),
            "lambda_p": d.lambda_p.to_string(),
        })).collect::<Value>(),
    })
    .to_string())
}

/// Truncation error of the iterated-integral series against RK4 for every
/// order up to `max_order`, with the a priori remainder bound.
pub fn chen_convergence_json(dim: usize, r: f64, seed: u64, max_order: usize, grid: usize) -> Out {
    if !((1..=6).contains(&dim) && r > 0.0 && r.is_finite() && max_order <= 30 && (2..=20_000).contains(&grid)) {
        return Err("need 1 <= dim <= 6, R > 0, order <= 30, 2 <= grid <= 20000".into());
    }
    let path = random_path(dim, r, seed);
    let series = picard_transport(&path, max_order, grid).map_err(err)?;
    let exact = rk4_transport(&path, grid).map_err(err)?;
    let mut partial = linalg::identity(dim) * linalg::c(0.0);
    let rows: Vec<Value> = series
        .terms
        .iter()
        .enumerate()
        .map(|(n, t)| {
            partial += t;
            json!({
                "order": n,
                "term_norm": num(linalg::op_norm(t)),
                "error": num(linalg::op_norm(&(&partial - &exact))),
                "remainder_bound": num(exp_tail(series.r, n)),
            })
        })
        .collect();
    Ok(json!({"R": num(series.r), "rows": rows}).to_string())
}

/// Trace of the holonomy of `rho` perturbed by `s * theta` for `s` from 0 to
/// `max_scale`, by series and by RK4.
pub fn perturbed_trace_json(group: &str, genus: usize, word: &str, seed: u64, max_scale: f64, steps: usize) -> Out {
    if !(max_scale.is_finite() && max_scale >= 0.0 && (1..=200).contains(&steps)) {
        return Err("need max_scale >= 0 and 1 <= steps <= 200".into());
    }
    let spec = GroupSpec::parse(group).map_err(err)?;
    let pres = SurfacePresentation::new(genus).map_err(err)?;
    let rho = sample_representation_reseeding(&spec, &pres, seed, 8).map_err(err)?;
    let w = pres.parse_word(word, WordKind::Based).map_err(err)?;
    let basis = AlgebraBasis::new(spec);
    let mut rows = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let s = max_scale * i as f64 / steps as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = Perturbation::random(&basis, pres.num_generators(), s, &mut rng);
        let ph = perturbed_holonomy(&rho, &w, &theta, 12, 400, TransportSign::Negative).map_err(err)?;
        let direct = perturbed_holonomy_rk4(&rho, &w, &theta, 400, TransportSign::Negative).map_err(err)?;
        rows.push(json!({
            "scale": num(s),
            "series": num(ph.trace()),
            "rk4": num(linalg::re_trace(&direct)),
            "remainder_bound": num(ph.series.remainder),
        }));
    }
    Ok(json!({
        "group": spec.to_string(),
        "word": w.to_string(),
        "flat_trace": num(rho.trace_function(&w)),
        "relator_residual": num(rho.relator_residual()),
        "rows": rows,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn bracket(genus: usize, gamma: &str, lambda: &str, unoriented: bool, seed: u32) -> Result<String, JsValue> {
    bracket_json(genus, gamma, lambda, unoriented, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn chen_convergence(dim: usize, r: f64, seed: u32, max_order: usize, grid: usize) -> Result<String, JsValue> {
    chen_convergence_json(dim, r, seed as u64, max_order, grid).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn perturbed_trace(group: &str, genus: usize, word: &str, seed: u32, max_scale: f64, steps: usize) -> Result<String, JsValue> {
    perturbed_trace_json(group, genus, word, seed as u64, max_scale, steps).map_err(|e| JsValue::from_str(&e))
}
