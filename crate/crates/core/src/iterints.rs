//! Iterated integrals of the three logarithmic forms along straight segments
//! from the origin, evaluated as one triangular ODE over all words.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::Word;
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};
use crate::potential::{forms_at, ModuliConfig};

/// Minimum distance every integration path keeps from the punctures.
pub const DELTA_PATH: f64 = 0.05;
pub const MAX_DEPTH: usize = 6;
pub const DEFAULT_TOL: f64 = 1e-11;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Endpoint {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "i")]
    I,
}

impl Endpoint {
    pub fn value(self) -> Complex64 {
        match self {
            Endpoint::One => Complex64::new(1.0, 0.0),
            Endpoint::I => I,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Endpoint::One => "1",
            Endpoint::I => "i",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PathPiece {
    Segment {
        from: Complex64,
        to: Complex64,
    },
    /// Circular arc `center + radius e^{i(start + sweep s)}`, `s` in [0, 1].
    Arc {
        center: Complex64,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl PathPiece {
    pub fn point(&self, s: f64) -> Complex64 {
        match *self {
            PathPiece::Segment { from, to } => from + (to - from) * s,
            PathPiece::Arc { center, radius, start, sweep } => {
                center + Complex64::from_polar(radius, start + sweep * s)
            }
        }
    }

    pub fn velocity(&self, s: f64) -> Complex64 {
        match *self {
            PathPiece::Segment { from, to } => to - from,
            PathPiece::Arc { radius, start, sweep, .. } => I * sweep * Complex64::from_polar(radius, start + sweep * s),
        }
    }

    pub fn distance_to(&self, z: Complex64) -> f64 {
        match *self {
            PathPiece::Segment { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (z - from).norm();
                }
                let s = (((z - from) * d.conj()).re / len2).clamp(0.0, 1.0);
                (z - (from + d * s)).norm()
            }
            PathPiece::Arc { center, radius, start, sweep } => {
                let rel = z - center;
                let ends = (z - self.point(0.0)).norm().min((z - self.point(1.0)).norm());
                if sweep.abs() >= 2.0 * PI {
                    return (rel.norm() - radius).abs();
                }
                // angle of z measured from `start` in the sweep direction
                let mut a = (rel.arg() - start) * sweep.signum();
                a = a.rem_euclid(2.0 * PI);
                if a <= sweep.abs() {
                    (rel.norm() - radius).abs().min(ends)
                } else {
                    ends
                }
            }
        }
    }
}

/// Piecewise path made of segments and arcs, traversed in order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub pieces: Vec<PathPiece>,
}

impl PathSpec {
    pub fn segment(from: Complex64, to: Complex64) -> Self {
        Self { pieces: vec![PathPiece::Segment { from, to }] }
    }

    pub fn polyline(vertices: &[Complex64]) -> Self {
        Self { pieces: vertices.windows(2).map(|w| PathPiece::Segment { from: w[0], to: w[1] }).collect() }
    }

    pub fn then(mut self, piece: PathPiece) -> Self {
        self.pieces.push(piece);
        self
    }

    pub fn concat(mut self, other: &PathSpec) -> Self {
        self.pieces.extend_from_slice(&other.pieces);
        self
    }

    pub fn start(&self) -> Option<Complex64> {
        self.pieces.first().map(|p| p.point(0.0))
    }

    pub fn end(&self) -> Option<Complex64> {
        self.pieces.last().map(|p| p.point(1.0))
    }

    /// Closest approach to each of the given points; errors below [`DELTA_PATH`].
    pub fn check_clearance(&self, pts: &[Complex64; 4]) -> Result<()> {
        for (k, &pk) in pts.iter().enumerate() {
            let dist = self.pieces.iter().map(|pc| pc.distance_to(pk)).fold(f64::INFINITY, f64::min);
            if dist < DELTA_PATH {
                return Err(Error::PathSingularity { index: k + 1, dist });
            }
        }
        Ok(())
    }
}

/// Values `Omega_w(endpoint)` for every word of length `0..=depth`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaTable {
    pub endpoint: Endpoint,
    pub depth: usize,
    pub config: ModuliConfig,
    values: Vec<Complex64>,
    errors: Vec<f64>,
}

impl OmegaTable {
    pub fn get(&self, w: &Word) -> Complex64 {
        self.values[w.index()]
    }

    /// Lookup by letters; panics on words outside the table.
    pub fn at(&self, letters: &[u8]) -> Complex64 {
        let w = Word::new(letters.to_vec()).expect("letters in 1..=3");
        assert!(w.len() <= self.depth, "word {w} deeper than table depth {}", self.depth);
        self.get(&w)
    }

    pub fn error(&self, w: &Word) -> f64 {
        self.errors[w.index()]
    }

    pub fn max_error(&self) -> f64 {
        self.errors.iter().cloned().fold(0.0, f64::max)
    }

    /// Words of length 1..=depth with value and error estimate.
    pub fn entries(&self) -> impl Iterator<Item = (Word, Complex64, f64)> + '_ {
        Word::all_up_to(self.depth).into_iter().map(move |w| {
            let k = w.index();
            (w, self.values[k], self.errors[k])
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<_> =
            self.entries().map(|(w, v, e)| json!({"word": w.to_string(), "re": v.re, "im": v.im, "err": e})).collect();
        json!({"endpoint": self.endpoint.to_string(), "depth": self.depth, "entries": entries})
    }
}

/// Iterated integrals along an arbitrary path, all words up to `depth`.
/// Returns values and accumulated error estimates in dense word order.
pub fn iterated_along(
    pts: &[Complex64; 4],
    path: &PathSpec,
    depth: usize,
    tol: f64,
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    if depth > MAX_DEPTH {
        return Err(Error::DepthCap(depth));
    }
    path.check_clearance(pts)?;
    let total = Word::count_up_to(depth);
    // parent index and last letter of every nonempty word
    let words: Vec<Word> = Word::all_up_to(depth);
    let parent: Vec<usize> =
        words.iter().map(|w| Word::new(w.letters()[..w.len() - 1].to_vec()).unwrap().index()).collect();
    let last: Vec<usize> = words.iter().map(|w| (w.letters()[w.len() - 1] - 1) as usize).collect();

    let zero = Complex64::new(0.0, 0.0);
    let mut values = vec![zero; total];
    values[0] = Complex64::new(1.0, 0.0);
    let mut errors = vec![0.0; total];
    let opts = OdeOptions::with_tol(tol);
    for piece in &path.pieces {
        let y0 = values[1..].to_vec();
        let out = integrate(
            |s, y, dy| {
                let z = piece.point(s);
                let w = forms_at(pts, z);
                let dz = piece.velocity(s);
                let wk = [w[0] * dz, w[1] * dz, w[2] * dz];
                for i in 0..y.len() {
                    let par = parent[i];
                    let prefix = if par == 0 { Complex64::new(1.0, 0.0) } else { y[par - 1] };
                    dy[i] = prefix * wk[last[i]];
                }
            },
            0.0,
            1.0,
            y0,
            &opts,
        )?;
        values[1..].copy_from_slice(&out.y);
        for (e, d) in errors[1..].iter_mut().zip(&out.err) {
            *e += d;
        }
    }
    Ok((values, errors))
}

pub fn omega_table(cfg: &ModuliConfig, endpoint: Endpoint, depth: usize) -> Result<OmegaTable> {
    omega_table_with_tol(cfg, endpoint, depth, DEFAULT_TOL)
}

pub fn omega_table_with_tol(cfg: &ModuliConfig, endpoint: Endpoint, depth: usize, tol: f64) -> Result<OmegaTable> {
    if depth > MAX_DEPTH {
        return Err(Error::DepthCap(depth));
    }
    let path = PathSpec::segment(Complex64::new(0.0, 0.0), endpoint.value());
    let (values, errors) = iterated_along(&cfg.punctures(), &path, depth, tol)?;
    Ok(OmegaTable { endpoint, depth, config: *cfg, values, errors })
}

/// The tables at both endpoints, built concurrently.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaPair {
    pub one: OmegaTable,
    pub i: OmegaTable,
}

impl OmegaPair {
    pub fn new(cfg: &ModuliConfig, depth: usize) -> Result<Self> {
        Self::with_tol(cfg, depth, DEFAULT_TOL)
    }

    pub fn with_tol(cfg: &ModuliConfig, depth: usize, tol: f64) -> Result<Self> {
        let (one, i) = rayon::join(
            || omega_table_with_tol(cfg, Endpoint::One, depth, tol),
            || omega_table_with_tol(cfg, Endpoint::I, depth, tol),
        );
        Ok(Self { one: one?, i: i? })
    }

    pub fn depth(&self) -> usize {
        self.one.depth.min(self.i.depth)
    }

    pub fn get(&self, endpoint: Endpoint) -> &OmegaTable {
        match endpoint {
            Endpoint::One => &self.one,
            Endpoint::I => &self.i,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedKey {
    /// `Omega_21(1)`
    Omega21AtOne,
    /// `Omega_31(i)`
    Omega31AtI,
}

fn principal_log(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::BranchCut(z));
    }
    Ok(z.ln())
}

/// Closed forms of the two depth-2 values entering the first-order solution.
pub fn omega_closed(cfg: &ModuliConfig, key: ClosedKey) -> Result<Complex64> {
    let p = cfg.p;
    let two_pi_i = 2.0 * PI * I;
    match key {
        ClosedKey::Omega21AtOne => Ok(two_pi_i * principal_log((p * p - 1.0) / (2.0 * I * p))?),
        ClosedKey::Omega31AtI => Ok(-two_pi_i * principal_log((p * p + 1.0) / (2.0 * p))?),
    }
}

/// `Im(Omega_21(1)) / 2 pi`, which equals `log|(p^2-1)/(2p)|`.
pub fn ell_s(cfg: &ModuliConfig) -> f64 {
    ((cfg.p * cfg.p - 1.0) / (2.0 * cfg.p)).norm().ln()
}

/// `-Im(Omega_31(i)) / 2 pi`, which equals `log|(p^2+1)/(2p)|`.
pub fn ell_c(cfg: &ModuliConfig) -> f64 {
    ((cfg.p * cfg.p + 1.0) / (2.0 * cfg.p)).norm().ln()
}

/// Residuals of the three depth-one anchors:
/// `Omega_3(1) = pi i`, `Omega_2(i) = -pi i`, `Omega_1(1) - Omega_1(i) = pi i`.
pub fn easy_anchor_residuals(pair: &OmegaPair) -> [f64; 3] {
    let (o, t) = (&pair.one, &pair.i);
    let pi_i = PI * I;
    [(o.at(&[3]) - pi_i).norm(), (t.at(&[2]) + pi_i).norm(), (o.at(&[1]) - t.at(&[1]) - pi_i).norm()]
}

/// All interleavings of two words, with multiplicity.
pub fn shuffle(a: &[u8], b: &[u8]) -> Vec<Vec<u8>> {
    if a.is_empty() {
        return vec![b.to_vec()];
    }
    if b.is_empty() {
        return vec![a.to_vec()];
    }
    let mut out = Vec::new();
    for mut w in shuffle(&a[..a.len() - 1], b) {
        w.push(a[a.len() - 1]);
        out.push(w);
    }
    for mut w in shuffle(a, &b[..b.len() - 1]) {
        w.push(b[b.len() - 1]);
        out.push(w);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShuffleResidual {
    pub depth2: f64,
    pub depth3: Option<f64>,
}

impl ShuffleResidual {
    pub fn max(&self) -> f64 {
        self.depth2.max(self.depth3.unwrap_or(0.0))
    }
}

/// Largest violation of `Omega_a Omega_b = sum over shuffles`, grouped by the
/// total length `|a| + |b|` (2, and 3 when the table is deep enough).
pub fn shuffle_residual(table: &OmegaTable) -> Result<ShuffleResidual> {
    if table.depth < 2 {
        return Err(Error::TableDepth { have: table.depth, need: 2 });
    }
    let worst = |total: usize| -> f64 {
        let mut m: f64 = 0.0;
        for la in 1..total {
            for a in Word::all(la) {
                for b in Word::all(total - la) {
                    let lhs = table.get(&a) * table.get(&b);
                    let rhs: Complex64 = shuffle(a.letters(), b.letters()).iter().map(|w| table.at(w)).sum();
                    m = m.max((lhs - rhs).norm());
                }
            }
        }
        m
    };
    Ok(ShuffleResidual { depth2: worst(2), depth3: (table.depth >= 3).then(|| worst(3)) })
}

/// Partial sum of `sum 1/k^3` up to `n` plus an Euler-Maclaurin tail with
/// `order` correction terms (0..=3).
pub fn zeta3_partial(n: u64, order: usize) -> f64 {
    let head: f64 = (1..=n).rev().map(|k| 1.0 / (k as f64).powi(3)).sum();
    let x = n as f64;
    let tail = [
        1.0 / (2.0 * x * x) - 1.0 / (2.0 * x.powi(3)),
        1.0 / (4.0 * x.powi(4)),
        -1.0 / (12.0 * x.powi(6)),
        1.0 / (12.0 * x.powi(8)),
    ];
    head + tail[..=order.min(3)].iter().sum::<f64>()
}

/// Apery's constant.
pub fn zeta3() -> f64 {
    zeta3_partial(64, 3)
}
