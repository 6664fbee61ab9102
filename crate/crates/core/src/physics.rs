//! Steady-state optical response of a one-sided cavity containing an NV
//! center, and the spin-selective reflection rule built on top of it.
//!
//! All rates and frequencies are expressed in units of the cavity decay rate
//! `kappa`, which is `1.0` for every parameter set built through
//! [`SystemParams::resonant`] or [`SystemParams::detuned`].

use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhysicsError {
    #[error("parameter `{0}` is not a finite number")]
    NonFinite(&'static str),

    #[error("parameter `{name}` is invalid: {reason}")]
    Invalid { name: &'static str, reason: &'static str },

    /// Both numerator and denominator of the coupled-cavity reflection vanish.
    #[error("degenerate reflection: denominator vanishes (kappa = gamma = g = 0 on resonance)")]
    Degenerate,
}

/// Physical parameters of one cavity-NV system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    /// Cavity mode angular frequency.
    pub omega_c: f64,
    /// NV transition angular frequency.
    pub omega_d: f64,
    /// Input photon angular frequency.
    pub omega_p: f64,
    /// Photon-NV coupling strength.
    pub g: f64,
    /// Cavity field decay rate (unit of everything else).
    pub kappa: f64,
    /// NV decay rate.
    pub gamma: f64,
}

impl SystemParams {
    /// Fully resonant system (`omega_c = omega_d = omega_p = 0`) with `kappa = 1`.
    pub fn resonant(g_over_kappa: f64, gamma_over_kappa: f64) -> Self {
        Self::detuned(g_over_kappa, gamma_over_kappa, 0.0, 0.0)
    }

    /// System with `kappa = 1`, the photon at zero frequency, the cavity
    /// detuned by `cavity_detuning` and the NV transition by
    /// `emitter_detuning`.
    pub fn detuned(g_over_kappa: f64, gamma_over_kappa: f64, cavity_detuning: f64, emitter_detuning: f64) -> Self {
        Self {
            omega_c: cavity_detuning,
            omega_d: emitter_detuning,
            omega_p: 0.0,
            g: g_over_kappa,
            kappa: 1.0,
            gamma: gamma_over_kappa,
        }
    }

    fn check_finite(&self) -> Result<(), PhysicsError> {
        let fields = [
            ("omega_c", self.omega_c),
            ("omega_d", self.omega_d),
            ("omega_p", self.omega_p),
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
        ];
        match fields.iter().find(|(_, v)| !v.is_finite()) {
            Some((name, _)) => Err(PhysicsError::NonFinite(name)),
            None => Ok(()),
        }
    }

    fn check_signs(&self) -> Result<(), PhysicsError> {
        if self.kappa < 0.0 {
            return Err(PhysicsError::Invalid { name: "kappa", reason: "must be positive" });
        }
        if self.gamma < 0.0 {
            return Err(PhysicsError::Invalid { name: "gamma", reason: "must be non-negative" });
        }
        if self.g < 0.0 {
            return Err(PhysicsError::Invalid { name: "g", reason: "must be non-negative" });
        }
        Ok(())
    }

    /// Checks every invariant (`kappa > 0`, `gamma >= 0`, `g >= 0`, finite).
    pub fn validate(&self) -> Result<(), PhysicsError> {
        self.check_finite()?;
        self.check_signs()?;
        if self.kappa == 0.0 {
            return Err(PhysicsError::Invalid { name: "kappa", reason: "must be positive" });
        }
        Ok(())
    }

    pub fn reflection_pair(&self) -> Result<ReflectionPair, PhysicsError> {
        Ok(ReflectionPair { r1: reflection_hot(self)?, r0: reflection_cold(self)? })
    }

    fn cavity_term(&self, sign: f64) -> C64 {
        C64::new(sign * self.kappa / 2.0, self.omega_c - self.omega_p)
    }
}

/// Reflection amplitude of a photon that couples to the NV transition
/// ("hot" cavity).
///
/// The emitter detuning is `omega_d - omega_p`. For `g = 0` the common
/// emitter factor is cancelled analytically, so the result is the cold
/// cavity reflection even when that factor itself vanishes.
pub fn reflection_hot(params: &SystemParams) -> Result<C64, PhysicsError> {
    params.check_finite()?;
    params.check_signs()?;

    // [i(wc - wp) -/+ k/2]
    let minus = params.cavity_term(-1.0);
    let plus = params.cavity_term(1.0);
    let emitter = C64::new(params.gamma / 2.0, params.omega_d - params.omega_p);
    let g2 = C64::new(params.g * params.g, 0.0);

    let (num, den) = if params.g == 0.0 { (minus, plus) } else { (minus * emitter + g2, plus * emitter + g2) };
    if den.norm_sqr() == 0.0 {
        return Err(PhysicsError::Degenerate);
    }
    if params.kappa == 0.0 {
        return Err(PhysicsError::Invalid { name: "kappa", reason: "must be positive" });
    }
    Ok(num / den)
}

/// Reflection amplitude of an uncoupled ("cold") cavity. Always a pure phase.
pub fn reflection_cold(params: &SystemParams) -> Result<C64, PhysicsError> {
    params.validate()?;
    let minus = params.cavity_term(-1.0);
    let plus = params.cavity_term(1.0);
    Ok(minus / plus)
}

/// The two reflection amplitudes of a cavity-NV system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReflectionPair {
    pub r1: C64,
    pub r0: C64,
}

impl ReflectionPair {
    /// Ideal lossless system: `r1 = 1`, `r0 = -1`.
    pub const IDEAL: ReflectionPair = ReflectionPair { r1: C64 { re: 1.0, im: 0.0 }, r0: C64 { re: -1.0, im: 0.0 } };

    /// `(r1 - r0) / 2`, the amplitude that survives one error-detecting block.
    pub fn success_amplitude(&self) -> C64 {
        (self.r1 - self.r0) / 2.0
    }

    /// `(r1 + r0) / 2`, the amplitude routed to a block's herald detector.
    pub fn leak_amplitude(&self) -> C64 {
        (self.r1 + self.r0) / 2.0
    }
}

/// Electron-spin basis state of an NV center.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    /// `|+1>`, stored as bit value 0.
    Plus,
    /// `|-1>`, stored as bit value 1.
    Minus,
}

impl Spin {
    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Spin::Plus
        } else {
            Spin::Minus
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Spin::Plus => 0,
            Spin::Minus => 1,
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Spin::Plus => 1,
            Spin::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Spin::Plus => Spin::Minus,
            Spin::Minus => Spin::Plus,
        }
    }

    pub fn from_value(value: i64) -> Option<Self> {
        match value {
            1 => Some(Spin::Plus),
            -1 => Some(Spin::Minus),
            _ => None,
        }
    }
}

impl std::fmt::Display for Spin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Spin::Plus => write!(f, "+1"),
            Spin::Minus => write!(f, "-1"),
        }
    }
}

/// Spin-selective reflection: a right-circular photon (`pol = 0`) couples to
/// `|+1>`, a left-circular photon (`pol = 1`) couples to `|-1>`; every other
/// combination sees the cold cavity.
pub fn scatter(pol: usize, spin: Spin, pair: &ReflectionPair) -> C64 {
    if (pol & 1) == spin.bit() {
        pair.r1
    } else {
        pair.r0
    }
}
