//! Rayleigh-fading channel realizations, beamformers and the scalar gains
//! that every rate expression consumes.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A `K x M` complex channel realization. Row `k` is the channel from the
/// `M` base-station antennas to single-antenna user `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    users: usize,
    antennas: usize,
    entries: Vec<Complex64>,
}

impl ChannelMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let users = rows.len();
        let antennas = rows.first().map_or(0, Vec::len);
        check_dims(users, antennas)?;
        if rows.iter().any(|r| r.len() != antennas) {
            return Err(Error::InvalidDimensions("ragged channel rows".into()));
        }
        let entries: Vec<Complex64> = rows.iter().flatten().copied().collect();
        if entries
            .iter()
            .any(|h| !h.re.is_finite() || !h.im.is_finite())
        {
            return Err(Error::InvalidDimensions("non-finite channel entry".into()));
        }
        Ok(Self {
            users,
            antennas,
            entries,
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn row(&self, k: usize) -> &[Complex64] {
        &self.entries[k * self.antennas..(k + 1) * self.antennas]
    }

    pub fn row_norm_sqr(&self, k: usize) -> f64 {
        self.row(k).iter().map(Complex64::norm_sqr).sum()
    }
}

fn check_dims(users: usize, antennas: usize) -> Result<()> {
    if users < 2 {
        return Err(Error::InvalidDimensions(format!(
            "need at least 2 users, got {users}"
        )));
    }
    if antennas < 1 {
        return Err(Error::InvalidDimensions(
            "need at least 1 antenna".to_string(),
        ));
    }
    Ok(())
}

/// Circularly-symmetric complex Gaussian with unit variance per entry.
fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn sample_channel_with<R: Rng + ?Sized>(
    users: usize,
    antennas: usize,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    check_dims(users, antennas)?;
    let entries = (0..users * antennas).map(|_| complex_normal(rng)).collect();
    Ok(ChannelMatrix {
        users,
        antennas,
        entries,
    })
}

/// Draws an i.i.d. Rayleigh channel: every entry is CN(0, 1).
pub fn sample_channel(users: usize, antennas: usize, stream: RngStream) -> Result<ChannelMatrix> {
    sample_channel_with(users, antennas, &mut stream.rng())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BeamformerKind {
    /// Matched to the unicast user's channel.
    Mrt,
    /// All-ones vector scaled to unit norm.
    EqualGain,
    /// Isotropic on the complex unit sphere.
    Random,
}

impl BeamformerKind {
    pub fn name(self) -> &'static str {
        match self {
            BeamformerKind::Mrt => "mrt",
            BeamformerKind::EqualGain => "equal",
            BeamformerKind::Random => "random",
        }
    }
}

impl std::str::FromStr for BeamformerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mrt" => Ok(BeamformerKind::Mrt),
            "equal" | "equal_gain" | "egc" => Ok(BeamformerKind::EqualGain),
            "random" => Ok(BeamformerKind::Random),
            other => Err(crate::error::invalid(
                "oma_beamformer",
                format!("unknown beamformer `{other}`"),
            )),
        }
    }
}

/// Unit-norm transmit weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    weights: Vec<Complex64>,
    kind: BeamformerKind,
    /// For MRT, the user the weights are matched to.
    target: Option<usize>,
}

impl Beamformer {
    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn kind(&self) -> BeamformerKind {
        self.kind
    }

    pub fn norm(&self) -> f64 {
        self.weights
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn make_beamformer_with<R: Rng + ?Sized>(
    channel: &ChannelMatrix,
    unicast: usize,
    kind: BeamformerKind,
    rng: &mut R,
) -> Result<Beamformer> {
    if unicast >= channel.users() {
        return Err(crate::error::invalid(
            "unicast_index",
            format!("{unicast} out of range for {} users", channel.users()),
        ));
    }
    let m = channel.antennas();
    let (weights, target) = match kind {
        BeamformerKind::Mrt => {
            let norm = channel.row_norm_sqr(unicast).sqrt();
            if norm == 0.0 {
                return Err(Error::DegenerateChannel { row: unicast });
            }
            let w = channel
                .row(unicast)
                .iter()
                .map(|h| h.conj() / norm)
                .collect();
            (w, Some(unicast))
        }
        BeamformerKind::EqualGain => {
            let scale = 1.0 / (m as f64).sqrt();
            (vec![Complex64::new(scale, 0.0); m], None)
        }
        BeamformerKind::Random => loop {
            let w: Vec<Complex64> = (0..m).map(|_| complex_normal(rng)).collect();
            let norm = w.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
            if norm > 0.0 {
                break (w.into_iter().map(|x| x / norm).collect(), None);
            }
        },
    };
    Ok(Beamformer {
        weights,
        kind,
        target,
    })
}

/// Builds the beamformer of the requested kind. Only `Random` consumes the stream.
pub fn make_beamformer(
    channel: &ChannelMatrix,
    unicast: usize,
    kind: BeamformerKind,
    stream: RngStream,
) -> Result<Beamformer> {
    make_beamformer_with(channel, unicast, kind, &mut stream.rng())
}

/// Effective scalar gains: `z1` for the unicast user and `z_k` for the
/// remaining `K - 1` users, with their minimum `u` and maximum `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveGains {
    z1: f64,
    others: Vec<f64>,
    u: f64,
    v: f64,
}

impl EffectiveGains {
    pub fn new(z1: f64, others: Vec<f64>) -> Result<Self> {
        if others.is_empty() {
            return Err(Error::InvalidDimensions(
                "need at least one non-unicast gain".into(),
            ));
        }
        let bad = |z: f64| !(z.is_finite() && z >= 0.0);
        if bad(z1) || others.iter().copied().any(bad) {
            return Err(crate::error::invalid(
                "gains",
                "gains must be finite and nonnegative",
            ));
        }
        let u = others.iter().copied().fold(f64::INFINITY, f64::min);
        let v = others.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { z1, others, u, v })
    }

    pub fn z1(&self) -> f64 {
        self.z1
    }

    pub fn others(&self) -> &[f64] {
        &self.others
    }

    /// Smallest non-unicast gain.
    pub fn u(&self) -> f64 {
        self.u
    }

    /// Largest non-unicast gain.
    pub fn v(&self) -> f64 {
        self.v
    }

    /// Smallest gain over all `K` users.
    pub fn min_all(&self) -> f64 {
        self.z1.min(self.u)
    }

    pub fn users(&self) -> usize {
        self.others.len() + 1
    }
}

fn projected_gain(row: &[Complex64], weights: &[Complex64]) -> f64 {
    row.iter()
        .zip(weights)
        .map(|(h, w)| h * w)
        .sum::<Complex64>()
        .norm_sqr()
}

/// Projects every user's channel on `beamformer`: `z_k = |h_k w|^2`.
///
/// When the beamformer is MRT toward `unicast`, `z1` is taken as that row's
/// squared norm, which is what `|h_1 w|^2` equals in exact arithmetic.
pub fn effective_gains(
    channel: &ChannelMatrix,
    beamformer: &Beamformer,
    unicast: usize,
) -> Result<EffectiveGains> {
    if beamformer.weights.len() != channel.antennas() {
        return Err(Error::InvalidDimensions(format!(
            "beamformer has {} weights, channel has {} antennas",
            beamformer.weights.len(),
            channel.antennas()
        )));
    }
    if unicast >= channel.users() {
        return Err(crate::error::invalid(
            "unicast_index",
            format!("{unicast} out of range for {} users", channel.users()),
        ));
    }
    let z1 = if beamformer.target == Some(unicast) {
        channel.row_norm_sqr(unicast)
    } else {
        projected_gain(channel.row(unicast), &beamformer.weights)
    };
    let others = (0..channel.users())
        .filter(|&k| k != unicast)
        .map(|k| projected_gain(channel.row(k), &beamformer.weights))
        .collect();
    EffectiveGains::new(z1, others)
}

pub(crate) fn sample_gains_direct_with<R: Rng + ?Sized>(
    users: usize,
    antennas: usize,
    rng: &mut R,
) -> Result<EffectiveGains> {
    check_dims(users, antennas)?;
    let z1: f64 = (0..antennas).map(|_| rng.sample::<f64, _>(Exp1)).sum();
    let others = (1..users).map(|_| rng.sample(Exp1)).collect();
    EffectiveGains::new(z1, others)
}

/// Samples the gains directly from their marginal laws: `z1 ~ Gamma(M, 1)`
/// and `z_k ~ Exp(1)` i.i.d. Equivalent in distribution to full-matrix MRT
/// toward a fixed user.
pub fn sample_gains_direct(
    users: usize,
    antennas: usize,
    stream: RngStream,
) -> Result<EffectiveGains> {
    sample_gains_direct_with(users, antennas, &mut stream.rng())
}

/// Picks the user with the largest channel norm; ties go to the lowest index.
pub fn select_unicast_user(channel: &ChannelMatrix) -> usize {
    let mut best = 0;
    let mut best_norm = channel.row_norm_sqr(0);
    for k in 1..channel.users() {
        let n = channel.row_norm_sqr(k);
        if n > best_norm {
            best = k;
            best_norm = n;
        }
    }
    best
}
