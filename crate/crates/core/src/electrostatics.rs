//! Potentials and fields of stray charges near a trapped particle: two point
//! charges on the trap axis, their quadratic expansion about the trap
//! centre, charged sheets, and a uniformly charged disc.

use crate::quantities::constants::{COULOMB, ELEMENTARY_CHARGE, VACUUM_PERMITTIVITY};
use crate::{Error, Result};

/// Point charges `q1` at `−x_q` and `q2` at `+x_q`, probed by `test_charge`.
/// Charges are in elementary charges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeScenario {
    pub q1_e: f64,
    pub q2_e: f64,
    /// Half-separation, m.
    pub x_q: f64,
    pub test_charge_e: f64,
}

impl ChargeScenario {
    pub fn new(q1_e: f64, q2_e: f64, x_q: f64) -> Result<Self> {
        Self::with_test_charge(q1_e, q2_e, x_q, 1.0)
    }

    pub fn with_test_charge(q1_e: f64, q2_e: f64, x_q: f64, test_charge_e: f64) -> Result<Self> {
        if !(x_q > 0.0 && x_q.is_finite()) {
            return Err(Error::param(format!("x_q must be positive, got {x_q}")));
        }
        if !(q1_e.is_finite() && q2_e.is_finite() && test_charge_e.is_finite()) {
            return Err(Error::param("charges must be finite"));
        }
        Ok(Self {
            q1_e,
            q2_e,
            x_q,
            test_charge_e,
        })
    }

    /// Single charge at `−x_q`.
    pub fn single(q1_e: f64, x_q: f64) -> Result<Self> {
        Self::new(q1_e, 0.0, x_q)
    }

    /// `s_q = q/(4πε₀)`, J·m/C.
    pub fn s_q(&self) -> f64 {
        self.test_charge_e * ELEMENTARY_CHARGE * COULOMB
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if !(x.abs() < self.x_q) {
            return Err(Error::Domain(format!(
                "|x| = {:e} m must be inside the charges at ±{:e} m",
                x.abs(),
                self.x_q
            )));
        }
        Ok(())
    }
}

/// Second-order expansion `U = s_q (A x + B x² + C)`, charges in coulombs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionCoefficients {
    /// C/m²
    pub a: f64,
    /// C/m³
    pub b: f64,
    /// C/m
    pub c_const: f64,
    /// J·m/C
    pub s_q: f64,
}

pub fn expansion_coefficients(s: &ChargeScenario) -> ExpansionCoefficients {
    let q1 = s.q1_e * ELEMENTARY_CHARGE;
    let q2 = s.q2_e * ELEMENTARY_CHARGE;
    let xq = s.x_q;
    ExpansionCoefficients {
        a: (q2 - q1) / (xq * xq),
        b: (q1 + q2) / (xq * xq * xq),
        c_const: (q1 + q2) / xq,
        s_q: s.s_q(),
    }
}

/// Interaction energy with both point charges, J.
pub fn potential_exact(s: &ChargeScenario, x: f64) -> Result<f64> {
    s.check_domain(x)?;
    let q1 = s.q1_e * ELEMENTARY_CHARGE;
    let q2 = s.q2_e * ELEMENTARY_CHARGE;
    Ok(s.s_q() * (q1 / (x + s.x_q).abs() + q2 / (x - s.x_q).abs()))
}

pub fn potential_quadratic(c: &ExpansionCoefficients, x: f64) -> f64 {
    c.s_q * (c.a * x + c.b * x * x + c.c_const)
}

/// Field of the expanded potential, `−(A + 2Bx)/(4πε₀)`, V/m.
pub fn field_at(s: &ChargeScenario, x: f64) -> Result<f64> {
    s.check_domain(x)?;
    let c = expansion_coefficients(s);
    Ok(-(c.a + 2.0 * c.b * x) * COULOMB)
}

/// Coulomb field of both charges along the axis, V/m.
pub fn field_exact(s: &ChargeScenario, x: f64) -> Result<f64> {
    s.check_domain(x)?;
    let q1 = s.q1_e * ELEMENTARY_CHARGE;
    let q2 = s.q2_e * ELEMENTARY_CHARGE;
    let d1 = x + s.x_q;
    let d2 = s.x_q - x;
    Ok(COULOMB * (q1 / (d1 * d1) - q2 / (d2 * d2)))
}

/// Uniform field between infinite sheets with densities `σ1` (at `−x_q`)
/// and `σ2` (at `+x_q`), C/m². Positive values point along `+x`.
pub fn sheet_pair_field(sigma1: f64, sigma2: f64) -> f64 {
    (sigma1 - sigma2) / (2.0 * VACUUM_PERMITTIVITY)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPointRatios {
    /// `U_disc/U_point` at equal total charge.
    pub u_ratio: f64,
    /// `E_disc/E_point` at equal total charge.
    pub e_ratio: f64,
}

/// On-axis potential and field of a uniformly charged disc of radius `r`,
/// relative to a point charge, at distance `x`.
pub fn disc_point_ratios(r: f64, x: f64) -> Result<DiscPointRatios> {
    if !(r > 0.0 && x > 0.0) {
        return Err(Error::param("radius and distance must be positive"));
    }
    let h = r.hypot(x);
    // √(r²+x²) − x written without cancellation.
    let diff = r * r / (h + x);
    let r2 = r * r;
    Ok(DiscPointRatios {
        u_ratio: 2.0 * x * diff / r2,
        e_ratio: 2.0 * x * x * (diff / h) / r2,
    })
}
