//! Laser-induced charging of a conductive mirror coating: photocurrent,
//! film resistance, the equilibrium charge it holds, and consistency of
//! resistivity with carrier transport data.

use crate::quantities::constants::{ELEMENTARY_CHARGE, PLANCK, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use crate::{Error, Result};

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be positive, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilmSample {
    /// Ω·m
    pub resistivity: f64,
    /// m
    pub thickness: f64,
    /// m
    pub mirror_radius: f64,
    /// F
    pub capacitance_to_ground: f64,
}

impl FilmSample {
    pub const DEFAULT_CAPACITANCE: f64 = 0.1e-12;

    pub fn new(
        resistivity: f64,
        thickness: f64,
        mirror_radius: f64,
        capacitance_to_ground: f64,
    ) -> Result<Self> {
        positive("resistivity", resistivity)?;
        positive("thickness", thickness)?;
        positive("mirror radius", mirror_radius)?;
        positive("capacitance", capacitance_to_ground)?;
        Ok(Self {
            resistivity,
            thickness,
            mirror_radius,
            capacitance_to_ground,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IlluminationScenario {
    /// W
    pub power: f64,
    /// m
    pub wavelength: f64,
    pub quantum_efficiency: f64,
    /// m
    pub beam_waist: f64,
    /// m
    pub mirror_distance: f64,
}

impl IlluminationScenario {
    pub fn new(
        power: f64,
        wavelength: f64,
        quantum_efficiency: f64,
        beam_waist: f64,
        mirror_distance: f64,
    ) -> Result<Self> {
        if !(power >= 0.0 && power.is_finite()) {
            return Err(Error::param("power must be non-negative"));
        }
        if !(0.0..=1.0).contains(&quantum_efficiency) {
            return Err(Error::param("quantum efficiency must lie in [0, 1]"));
        }
        positive("wavelength", wavelength)?;
        positive("beam waist", beam_waist)?;
        if !(mirror_distance >= 0.0) {
            return Err(Error::param("mirror distance must be non-negative"));
        }
        Ok(Self {
            power,
            wavelength,
            quantum_efficiency,
            beam_waist,
            mirror_distance,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Photocurrent {
    /// Electrons per second.
    pub rate: f64,
    /// A
    pub current: f64,
}

impl Photocurrent {
    /// Current given directly as an electron rate, bypassing the photon count.
    pub fn from_rate(rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::param("rate must be non-negative"));
        }
        Ok(Self {
            rate,
            current: rate * ELEMENTARY_CHARGE,
        })
    }
}

/// One photo-electron per absorbed photon times `η`: `ηPλ/(hc)`.
pub fn photocurrent(s: &IlluminationScenario) -> Photocurrent {
    let rate = s.quantum_efficiency * s.power * s.wavelength / (PLANCK * SPEED_OF_LIGHT);
    Photocurrent {
        rate,
        current: rate * ELEMENTARY_CHARGE,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilmResistance {
    /// Ω per square.
    pub sheet_resistance: f64,
    /// Ω
    pub resistance: f64,
}

/// `R_s = ρ/h`; a round film is taken as one square, `R = R_s`.
pub fn film_resistance(f: &FilmSample) -> FilmResistance {
    let sheet = f.resistivity / f.thickness;
    FilmResistance {
        sheet_resistance: sheet,
        resistance: sheet,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumCharge {
    /// V
    pub voltage: f64,
    /// e
    pub charge_e: f64,
    /// s
    pub rc_time: f64,
}

/// `V = IR`, `Q = RCI`.
pub fn equilibrium_charge(resistance: f64, capacitance: f64, current: f64) -> Result<EquilibriumCharge> {
    positive("resistance", resistance)?;
    positive("capacitance", capacitance)?;
    if !current.is_finite() {
        return Err(Error::param("current must be finite"));
    }
    let voltage = current * resistance;
    Ok(EquilibriumCharge {
        voltage,
        charge_e: capacitance * voltage / ELEMENTARY_CHARGE,
        rc_time: resistance * capacitance,
    })
}

/// Power fraction reaching a point `x_q` off a Gaussian beam's axis,
/// `exp(−x_q²/w0²)²`.
pub fn gaussian_clipping_factor(w0: f64, x_q: f64) -> Result<f64> {
    positive("beam waist", w0)?;
    Ok((-(x_q * x_q) / (w0 * w0)).exp().powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportSample {
    /// Measured resistivity, Ω·m.
    pub resistivity: f64,
    /// 1/m³
    pub carrier_density: f64,
    /// m²/(V·s)
    pub mobility: f64,
}

impl TransportSample {
    pub fn new(resistivity: f64, carrier_density: f64, mobility: f64) -> Result<Self> {
        positive("resistivity", resistivity)?;
        positive("carrier density", carrier_density)?;
        positive("mobility", mobility)?;
        Ok(Self {
            resistivity,
            carrier_density,
            mobility,
        })
    }

    /// Hall data in lab units: mΩ·cm, cm⁻³ and cm²/(V·s).
    pub fn from_lab_units(rho_mohm_cm: f64, n_per_cm3: f64, mu_cm2: f64) -> Result<Self> {
        Self::new(rho_mohm_cm * 1e-5, n_per_cm3 * 1e6, mu_cm2 * 1e-4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportCheck {
    /// `1/(n e µ)`, Ω·m.
    pub predicted_resistivity: f64,
    /// `|predicted/measured − 1|`
    pub relative_deviation: f64,
}

pub fn transport_consistency(t: &TransportSample) -> TransportCheck {
    let predicted = 1.0 / (t.carrier_density * ELEMENTARY_CHARGE * t.mobility);
    TransportCheck {
        predicted_resistivity: predicted,
        relative_deviation: (predicted / t.resistivity - 1.0).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacitanceBreakdown {
    /// Isolated disc, `8ε₀r`.
    pub self_capacitance: f64,
    /// Films on facing mirrors, `ε₀πr²/(2x_q)`.
    pub mirror_pair: f64,
    /// Coupling to nearby electrodes, supplied.
    pub electrodes: f64,
}

impl CapacitanceBreakdown {
    pub fn total(&self) -> f64 {
        self.self_capacitance + self.mirror_pair + self.electrodes
    }
}

pub fn capacitance_breakdown(mirror_radius: f64, x_q: f64, electrodes: f64) -> Result<CapacitanceBreakdown> {
    positive("mirror radius", mirror_radius)?;
    positive("x_q", x_q)?;
    if !(electrodes >= 0.0) {
        return Err(Error::param("electrode capacitance must be non-negative"));
    }
    Ok(CapacitanceBreakdown {
        self_capacitance: 8.0 * VACUUM_PERMITTIVITY * mirror_radius,
        mirror_pair: VACUUM_PERMITTIVITY * std::f64::consts::PI * mirror_radius * mirror_radius
            / (2.0 * x_q),
        electrodes,
    })
}
