//! Seeded synthetic datasets: peak ensembles with an optional outlier, periodic bump
//! trains, and a bump that splits in two.
//!
//! Coordinates are on the unit square; `x` runs along columns.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::ScalarField2D;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
struct Bump {
    x: f64,
    y: f64,
    amplitude: f64,
    width_x: f64,
    width_y: f64,
}

impl Bump {
    fn round(x: f64, y: f64, amplitude: f64, width: f64) -> Self {
        Bump { x, y, amplitude, width_x: width, width_y: width }
    }

    fn eval(&self, dx: f64, dy: f64) -> f64 {
        let q = (dx / self.width_x).powi(2) + (dy / self.width_y).powi(2);
        self.amplitude * (-0.5 * q).exp()
    }
}

fn jitter(rng: &mut ChaCha8Rng, range: f64) -> f64 {
    if range > 0.0 {
        rng.gen_range(-range..=range)
    } else {
        0.0
    }
}

/// Parameters of a peak ensemble: four large peaks near the corners of a square, one of
/// them carrying a ring of small peaks, and an optional peak in the middle.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub members: usize,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
    pub peak_amplitude: f64,
    pub amplitude_jitter: f64,
    pub peak_width: f64,
    pub width_jitter: f64,
    pub position_jitter: f64,
    /// Number of small peaks around the first large peak.
    pub small_peaks: usize,
    pub small_amplitude: f64,
    pub small_amplitude_jitter: f64,
    pub small_width: f64,
    /// Distance of the small peaks from the center of their large peak.
    pub small_radius: f64,
    pub center_peak: bool,
    pub center_amplitude: f64,
    pub center_width: f64,
    /// Member that omits the center peak.
    pub outlier_index: Option<usize>,
    /// Uniform noise in `[-noise, noise]` added to every grid value.
    pub noise: f64,
}

impl EnsembleSpec {
    /// Four large peaks with five small ones on the first.
    pub fn peaks(members: usize, seed: u64) -> Self {
        EnsembleSpec {
            members,
            rows: 100,
            cols: 100,
            seed,
            peak_amplitude: 1.0,
            amplitude_jitter: 0.03,
            peak_width: 0.08,
            width_jitter: 0.004,
            position_jitter: 0.01,
            small_peaks: 5,
            small_amplitude: 0.2,
            small_amplitude_jitter: 0.02,
            small_width: 0.02,
            small_radius: 0.2,
            center_peak: false,
            center_amplitude: 0.6,
            center_width: 0.06,
            outlier_index: None,
            noise: 0.0,
        }
    }

    /// [`EnsembleSpec::peaks`] plus a center peak that `outlier_index` lacks.
    pub fn outlier(members: usize, outlier_index: usize, seed: u64) -> Self {
        EnsembleSpec {
            center_peak: true,
            outlier_index: Some(outlier_index),
            ..Self::peaks(members, seed)
        }
    }

    /// Sets one parameter from its textual key and value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "members" => self.members = parse_value(key, value)?,
            "rows" => self.rows = parse_value(key, value)?,
            "cols" => self.cols = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "peak_amplitude" => self.peak_amplitude = parse_value(key, value)?,
            "amplitude_jitter" => self.amplitude_jitter = parse_value(key, value)?,
            "peak_width" => self.peak_width = parse_value(key, value)?,
            "width_jitter" => self.width_jitter = parse_value(key, value)?,
            "position_jitter" => self.position_jitter = parse_value(key, value)?,
            "small_peaks" => self.small_peaks = parse_value(key, value)?,
            "small_amplitude" => self.small_amplitude = parse_value(key, value)?,
            "small_amplitude_jitter" => self.small_amplitude_jitter = parse_value(key, value)?,
            "small_width" => self.small_width = parse_value(key, value)?,
            "small_radius" => self.small_radius = parse_value(key, value)?,
            "center_peak" => self.center_peak = parse_value(key, value)?,
            "center_amplitude" => self.center_amplitude = parse_value(key, value)?,
            "center_width" => self.center_width = parse_value(key, value)?,
            "outlier_index" => {
                self.outlier_index = match value {
                    "none" => None,
                    v => Some(parse_value(key, v)?),
                }
            }
            "noise" => self.noise = parse_value(key, value)?,
            _ => return Err(Error::InvalidArgument(format!("unknown ensemble parameter '{key}'"))),
        }
        Ok(())
    }

    /// Turns off every source of variation between members.
    pub fn without_jitter(mut self) -> Self {
        self.amplitude_jitter = 0.0;
        self.width_jitter = 0.0;
        self.position_jitter = 0.0;
        self.small_amplitude_jitter = 0.0;
        self.noise = 0.0;
        self
    }

    fn check(&self) -> Result<()> {
        if self.members == 0 || self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidArgument("members, rows and cols must be positive".into()));
        }
        if let Some(i) = self.outlier_index {
            if i >= self.members {
                return Err(Error::InvalidArgument(format!(
                    "outlier index {i} is out of range for {} members",
                    self.members
                )));
            }
        }
        Ok(())
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value '{value}' for '{key}'")))
}

/// Generates every member of an ensemble. Identical specs give bit-identical fields.
pub fn generate_ensemble(spec: &EnsembleSpec) -> Result<Vec<ScalarField2D>> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centers = [(0.3, 0.3), (0.7, 0.3), (0.3, 0.7), (0.7, 0.7)];
    let mut out = Vec::with_capacity(spec.members);
    for m in 0..spec.members {
        let mut bumps = Vec::new();
        for (i, &(cx, cy)) in centers.iter().enumerate() {
            let x = cx + jitter(&mut rng, spec.position_jitter);
            let y = cy + jitter(&mut rng, spec.position_jitter);
            let a = spec.peak_amplitude + jitter(&mut rng, spec.amplitude_jitter);
            let w = spec.peak_width + jitter(&mut rng, spec.width_jitter);
            bumps.push(Bump::round(x, y, a, w));
            if i == 0 {
                // the ring points away from the other peaks
                for k in 0..spec.small_peaks {
                    let angle = TAU * (0.375 + 0.5 * (k as f64 + 0.5) / spec.small_peaks as f64);
                    let a = spec.small_amplitude + jitter(&mut rng, spec.small_amplitude_jitter);
                    let (sx, sy) = (x + spec.small_radius * angle.cos(), y + spec.small_radius * angle.sin());
                    bumps.push(Bump::round(sx, sy, a, spec.small_width));
                }
            }
        }
        let center_amplitude = spec.center_amplitude + jitter(&mut rng, spec.small_amplitude_jitter);
        if spec.center_peak && spec.outlier_index != Some(m) {
            bumps.push(Bump::round(0.5, 0.5, center_amplitude, spec.center_width));
        }
        let mut field = ScalarField2D::from_fn(spec.rows, spec.cols, |x, y| {
            bumps.iter().map(|b| b.eval(x - b.x, y - b.y)).sum()
        })?;
        if spec.noise > 0.0 {
            let values = field.values().iter().map(|v| v + jitter(&mut rng, spec.noise)).collect();
            field = ScalarField2D::new(spec.rows, spec.cols, values)?;
        }
        out.push(field);
    }
    Ok(out)
}

/// Parameters of a time series of bumps translating along `x` with wrap-around.
///
/// Frame `t` depends on `t mod period` only, except for a slow amplitude drift that grows
/// with `t` and is scaled by `variation`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicSpec {
    pub length: usize,
    pub period: usize,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
    /// Relative amplitude drift per period.
    pub variation: f64,
    pub bumps: usize,
    /// Relative amplitude change with the `x` position of a bump.
    pub modulation: f64,
    pub width_x: f64,
    pub width_y: f64,
}

impl PeriodicSpec {
    pub fn new(length: usize, period: usize, seed: u64) -> Self {
        PeriodicSpec {
            length,
            period,
            rows: 24,
            cols: 72,
            seed,
            variation: 0.01,
            bumps: 4,
            modulation: 0.3,
            width_x: 0.05,
            width_y: 0.15,
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "length" => self.length = parse_value(key, value)?,
            "period" => self.period = parse_value(key, value)?,
            "rows" => self.rows = parse_value(key, value)?,
            "cols" => self.cols = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "variation" => self.variation = parse_value(key, value)?,
            "bumps" => self.bumps = parse_value(key, value)?,
            "modulation" => self.modulation = parse_value(key, value)?,
            "width_x" => self.width_x = parse_value(key, value)?,
            "width_y" => self.width_y = parse_value(key, value)?,
            _ => return Err(Error::InvalidArgument(format!("unknown periodic parameter '{key}'"))),
        }
        Ok(())
    }
}

/// Generates the frames of a periodic series.
pub fn generate_periodic_series(spec: &PeriodicSpec) -> Result<Vec<ScalarField2D>> {
    if spec.period < 2 || spec.length < 2 * spec.period {
        return Err(Error::InvalidArgument(format!(
            "need period >= 2 and length >= 2 * period, got period {} and length {}",
            spec.period, spec.length
        )));
    }
    if spec.bumps == 0 || spec.rows == 0 || spec.cols == 0 {
        return Err(Error::InvalidArgument("bumps, rows and cols must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k = spec.bumps;
    // (x offset, y, base amplitude, drift direction)
    let train: Vec<(f64, f64, f64, f64)> = (0..k)
        .map(|i| {
            let x0 = i as f64 / k as f64 + jitter(&mut rng, 0.25 / k as f64);
            let y = if i % 2 == 0 { 0.35 } else { 0.65 } + jitter(&mut rng, 0.05);
            let a = 1.0 - 0.5 * i as f64 / k as f64 + jitter(&mut rng, 0.05 / k as f64);
            let drift = rng.gen_range(-1.0..=1.0);
            (x0, y, a, drift)
        })
        .collect();

    let mut frames = Vec::with_capacity(spec.length);
    for t in 0..spec.length {
        let phase = (t % spec.period) as f64 / spec.period as f64;
        let growth = spec.variation * t as f64 / spec.period as f64;
        let bumps: Vec<Bump> = train
            .iter()
            .map(|&(x0, y, a, drift)| {
                let x = (x0 + phase).rem_euclid(1.0);
                let amplitude = a * (1.0 + spec.modulation * (TAU * x).cos()) * (1.0 + drift * growth);
                Bump { x, y, amplitude, width_x: spec.width_x, width_y: spec.width_y }
            })
            .collect();
        let field = ScalarField2D::from_fn(spec.rows, spec.cols, |x, y| {
            bumps
                .iter()
                .map(|b| {
                    let dx = (x - b.x + 0.5).rem_euclid(1.0) - 0.5;
                    b.eval(dx, y - b.y)
                })
                .sum()
        })?;
        frames.push(field);
    }
    Ok(frames)
}

/// A static peak next to a peak that separates into two over time. The separation
/// starts at `split_start` and grows by one step of `speed` per frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitSpec {
    pub steps: usize,
    pub rows: usize,
    pub cols: usize,
    pub split_start: usize,
    pub speed: f64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { steps: 16, rows: 40, cols: 40, split_start: 2, speed: 0.01 }
    }
}

impl SplitSpec {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "steps" | "length" => self.steps = parse_value(key, value)?,
            "rows" => self.rows = parse_value(key, value)?,
            "cols" => self.cols = parse_value(key, value)?,
            "split_start" => self.split_start = parse_value(key, value)?,
            "speed" => self.speed = parse_value(key, value)?,
            _ => return Err(Error::InvalidArgument(format!("unknown split parameter '{key}'"))),
        }
        Ok(())
    }
}

pub fn generate_split_series(spec: &SplitSpec) -> Result<Vec<ScalarField2D>> {
    if spec.steps < 2 {
        return Err(Error::InvalidArgument("a split series needs at least 2 steps".into()));
    }
    (0..spec.steps)
        .map(|t| {
            let s = spec.speed * t.saturating_sub(spec.split_start) as f64;
            let bumps = [
                Bump::round(0.25, 0.5, 1.6, 0.08),
                Bump::round(0.7, 0.5 - s, 0.8, 0.06),
                Bump::round(0.7, 0.5 + s, 0.6, 0.06),
            ];
            ScalarField2D::from_fn(spec.rows, spec.cols, |x, y| bumps.iter().map(|b| b.eval(x - b.x, y - b.y)).sum())
        })
        .collect()
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str, path: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(path, i + 1, format!("expected 'key = value', found '{line}'")))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::parse(path, i + 1, "empty key"));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ensembles_are_deterministic() {
        let spec = EnsembleSpec { rows: 20, cols: 20, ..EnsembleSpec::outlier(4, 1, 9) };
        assert_eq!(generate_ensemble(&spec).unwrap(), generate_ensemble(&spec).unwrap());
        let other = EnsembleSpec { seed: 10, ..spec.clone() };
        assert_ne!(generate_ensemble(&spec).unwrap(), generate_ensemble(&other).unwrap());
    }

    #[test]
    fn no_jitter_gives_identical_members() {
        let spec = EnsembleSpec { rows: 20, cols: 20, ..EnsembleSpec::peaks(3, 1) }.without_jitter();
        let f = generate_ensemble(&spec).unwrap();
        assert_eq!(f[0], f[1]);
        assert_eq!(f[1], f[2]);
    }

    #[test]
    fn periodic_frames_repeat_without_variation() {
        let mut spec = PeriodicSpec::new(10, 5, 3);
        spec.variation = 0.0;
        let f = generate_periodic_series(&spec).unwrap();
        assert_eq!(f[0], f[5]);
        assert_eq!(f[2], f[7]);
        assert_ne!(f[0], f[1]);
        assert!(generate_periodic_series(&PeriodicSpec::new(9, 5, 3)).is_err());
    }

    #[test]
    fn key_values() {
        let kv = parse_key_values("# c\nmembers = 5\n\nseed=3\n", Path::new("g.cfg")).unwrap();
        assert_eq!(kv["members"], "5");
        let mut spec = EnsembleSpec::peaks(1, 0);
        for (k, v) in &kv {
            spec.set(k, v).unwrap();
        }
        assert_eq!((spec.members, spec.seed), (5, 3));
        assert!(spec.set("colour", "red").is_err());
        assert!(spec.set("members", "many").is_err());
        let err = parse_key_values("a=1\noops\n", Path::new("g.cfg")).unwrap_err();
        assert_eq!(err.to_string(), "g.cfg:2: expected 'key = value', found 'oops'");
    }

    #[test]
    fn outlier_index_is_checked() {
        assert!(generate_ensemble(&EnsembleSpec::outlier(3, 3, 0)).is_err());
    }
}
