use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::charging::{
    equilibrium_charge, film_resistance, gaussian_clipping_factor, photocurrent, Photocurrent,
};
use crate::electrostatics::ChargeScenario;
use crate::ion_impact::{
    carrier_intensity_factor, gate_detuning_verdict, ion_response, lamb_dicke_budget,
    max_charge_for_cooling, max_charge_for_coupling, max_symmetric_charge_for_gate,
};
use crate::quantities::propagate_monte_carlo;
use crate::rydberg_impact::{max_charge_for_coherence, max_charge_for_infidelity, rydberg_response};
use crate::scenario::Scenario;
use crate::{Backend, Dimension, Error, Result, UncertainQuantity};

const SWEEP_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetTarget {
    Cooling,
    Coupling,
    LambDicke,
    Gate,
    RydbergCoherence,
    RydbergGate,
    Charging,
}

impl BudgetTarget {
    pub const ALL: [BudgetTarget; 7] = [
        BudgetTarget::Cooling,
        BudgetTarget::Coupling,
        BudgetTarget::LambDicke,
        BudgetTarget::Gate,
        BudgetTarget::RydbergCoherence,
        BudgetTarget::RydbergGate,
        BudgetTarget::Charging,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BudgetTarget::Cooling => "cooling",
            BudgetTarget::Coupling => "coupling",
            BudgetTarget::LambDicke => "lamb-dicke",
            BudgetTarget::Gate => "gate",
            BudgetTarget::RydbergCoherence => "rydberg-coherence",
            BudgetTarget::RydbergGate => "rydberg-gate",
            BudgetTarget::Charging => "charging",
        }
    }
}

impl fmt::Display for BudgetTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BudgetTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::param(format!("unknown budget target {s:?}")))
    }
}

/// Figure of merit sampled over a charge range, for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// Column names with units.
    pub header: [&'static str; 2],
    pub points: Vec<(f64, f64)>,
}

impl Sweep {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.header[0], self.header[1]);
        for (x, y) in &self.points {
            let _ = writeln!(out, "{x:e},{y:e}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetReport {
    pub target: BudgetTarget,
    pub scenario: String,
    pub seed: u64,
    pub samples: usize,
    /// Named outputs; sigma from Monte-Carlo over `x_q`.
    pub outputs: Vec<(&'static str, UncertainQuantity)>,
    pub notes: Vec<String>,
    pub sweep: Sweep,
}

impl BudgetReport {
    pub fn output(&self, name: &str) -> Option<UncertainQuantity> {
        self.outputs.iter().find(|(n, _)| *n == name).map(|(_, q)| *q)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "budget {} for scenario {:?} (seed {}, {} samples)\n",
            self.target, self.scenario, self.seed, self.samples
        );
        let w = self.outputs.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        for (name, q) in &self.outputs {
            let _ = writeln!(
                out,
                "  {name:<w$}  {:>12.5e} ± {:<10.3e} {}",
                q.value(),
                q.sigma(),
                q.dimension().unit()
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out
    }
}

type Outputs = Vec<(&'static str, f64, Dimension)>;

fn evaluate(target: BudgetTarget, sc: &Scenario, x_q: f64) -> Result<Outputs> {
    use Dimension::*;
    Ok(match target {
        BudgetTarget::Cooling => {
            let trap = sc.trap_config()?;
            let b = max_charge_for_cooling(&trap, x_q, sc.trap_setting("intensity_floor", 0.5)?)?;
            vec![
                ("q1_max", b.q1_max, ElementaryCharge),
                ("field_at_x_eq", b.response.field, Field),
                ("x_eq", b.response.x_eq, Length),
                ("micromotion", b.response.micromotion, Length),
            ]
        }
        BudgetTarget::Coupling => {
            let trap = sc.trap_config()?;
            let b = max_charge_for_coupling(&trap, x_q, sc.trap_setting("coupling_fraction", 0.125)?)?;
            vec![
                ("q1_max", b.q1_max, ElementaryCharge),
                ("field_at_x_eq", b.response.field, Field),
                ("x_eq", b.response.x_eq, Length),
            ]
        }
        BudgetTarget::LambDicke => {
            let trap = sc.trap_config()?;
            let b = lamb_dicke_budget(&trap, x_q, sc.trap_setting("lamb_dicke_limit", 0.2)?)?;
            vec![
                ("q1_max", b.q1_max, ElementaryCharge),
                ("field_at_x_eq", b.field, Field),
                ("x_eq_max", b.x_eq_max, Length),
                ("micromotion_max", b.micromotion_max, Length),
            ]
        }
        BudgetTarget::Gate => {
            let trap = sc.trap_config()?;
            let gate = sc.gate_params()?;
            let c = sc.charge_scenario()?;
            let s = ChargeScenario::new(c.q1_e, c.q2_e, x_q)?;
            let v = gate_detuning_verdict(&trap, &s, &gate)?;
            vec![
                ("delta_x", v.delta_x, AngularFrequency),
                ("delta_x_over_rabi", v.ratio, Dimensionless),
                ("delta_x_over_secular", v.fractional_shift, Dimensionless),
                ("q_each_max", max_symmetric_charge_for_gate(&trap, x_q, &gate)?, ElementaryCharge),
            ]
        }
        BudgetTarget::RydbergCoherence => {
            let cfg = sc.rydberg_config()?;
            let tau = sc
                .rydberg_setting("coherence_time_s")?
                .ok_or_else(|| Error::Schema("[rydberg].coherence_time_s: required for this target".into()))?;
            let b = max_charge_for_coherence(&cfg, tau, x_q)?;
            let r = rydberg_response(&cfg, b.q1, x_q)?;
            vec![
                ("q1_max", b.q1, ElementaryCharge),
                ("field_at_centre", b.field, Field),
                ("stark_shift", r.shift_hz, Frequency),
            ]
        }
        BudgetTarget::RydbergGate => {
            let cfg = sc.rydberg_config()?;
            let target = sc.rydberg_setting("target_infidelity")?.ok_or_else(|| {
                Error::Schema("[rydberg].target_infidelity: required for this target".into())
            })?;
            let b = max_charge_for_infidelity(&cfg, target, x_q)?;
            let r = rydberg_response(&cfg, b.q1, x_q)?;
            vec![
                ("q1_max", b.q1, ElementaryCharge),
                ("field_at_centre", b.field, Field),
                ("stark_shift", r.shift_hz, Frequency),
            ]
        }
        BudgetTarget::Charging => {
            let film = sc.film_sample()?;
            let fr = film_resistance(&film);
            let ill = sc.illumination()?;
            let ill = crate::charging::IlluminationScenario { mirror_distance: x_q, ..ill };
            let rate = photocurrent(&ill).rate;
            let clip = gaussian_clipping_factor(ill.beam_waist, x_q)?;
            let used = sc.electron_rate_override()?.unwrap_or(rate * clip);
            let q = equilibrium_charge(
                fr.resistance,
                film.capacitance_to_ground,
                Photocurrent::from_rate(used)?.current,
            )?;
            vec![
                ("sheet_resistance", fr.sheet_resistance, Resistance),
                ("resistance", fr.resistance, Resistance),
                ("photon_rate", rate, Frequency),
                ("clipping_factor", clip, Dimensionless),
                ("clipped_rate", rate * clip, Frequency),
                ("electron_rate_used", used, Frequency),
                ("voltage", q.voltage, Voltage),
                ("charge", q.charge_e, ElementaryCharge),
                ("rc_time", q.rc_time, Time),
            ]
        }
    })
}

fn grid(max: f64, from_zero: bool) -> impl Fn(usize) -> f64 {
    move |i| {
        if from_zero {
            max * i as f64 / (SWEEP_POINTS - 1) as f64
        } else {
            max * (i + 1) as f64 / SWEEP_POINTS as f64
        }
    }
}

fn sweep(target: BudgetTarget, sc: &Scenario, nominal: &Outputs, backend: Backend) -> Result<Sweep> {
    let x_q = sc.x_q()?.value();
    let first = nominal[0].1;
    let (header, from_zero, span): ([&'static str; 2], bool, f64) = match target {
        BudgetTarget::Cooling => (["q1_e", "carrier_intensity_factor"], true, 2.0 * first),
        BudgetTarget::Coupling => (["q1_e", "x_eq_m"], true, 2.0 * first),
        BudgetTarget::LambDicke => (["q1_e", "modulation_index"], true, 2.0 * first),
        BudgetTarget::Gate => (["q_each_e", "delta_x_over_rabi"], true, 2.0 * nominal[3].1),
        BudgetTarget::RydbergCoherence => (["q1_e", "tau_pi_s"], false, 2.0 * first),
        BudgetTarget::RydbergGate => (["q1_e", "infidelity"], true, 2.0 * first),
        BudgetTarget::Charging => (["electron_rate_per_s", "charge_e"], true, 2.0 * nominal[5].1),
    };
    let at = grid(span, from_zero);
    let eval = |x: f64| -> Result<f64> {
        match target {
            BudgetTarget::Cooling | BudgetTarget::Coupling | BudgetTarget::LambDicke => {
                let trap = sc.trap_config()?;
                let r = ion_response(&trap, &ChargeScenario::single(x, x_q)?)?;
                Ok(match target {
                    BudgetTarget::Cooling => carrier_intensity_factor(r.micromotion, trap.cooling_wavelength),
                    BudgetTarget::Coupling => r.x_eq,
                    _ => 2.0 * std::f64::consts::PI * r.micromotion / trap.gate_wavelength,
                })
            }
            BudgetTarget::Gate => {
                let s = ChargeScenario::new(x, x, x_q)?;
                Ok(gate_detuning_verdict(&sc.trap_config()?, &s, &sc.gate_params()?)?.ratio)
            }
            BudgetTarget::RydbergCoherence => Ok(rydberg_response(&sc.rydberg_config()?, x, x_q)?.decoherence_time),
            BudgetTarget::RydbergGate => Ok(rydberg_response(&sc.rydberg_config()?, x, x_q)?.infidelity),
            BudgetTarget::Charging => {
                let film = sc.film_sample()?;
                let r = film_resistance(&film).resistance;
                let i = Photocurrent::from_rate(x)?.current;
                Ok(equilibrium_charge(r, film.capacitance_to_ground, i)?.charge_e)
            }
        }
    };
    let points = backend
        .map_range(SWEEP_POINTS, |i| {
            let x = at(i);
            eval(x).map(|y| (x, y))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep { header, points })
}

/// Runs one budget on a scenario. Sigmas come from Monte-Carlo over
/// `[charges].xq_sigma_m` with the scenario's seed and sample count.
pub fn run_budget(sc: &Scenario, target: BudgetTarget, backend: Backend) -> Result<BudgetReport> {
    let x_q = sc.x_q()?;
    let nominal = evaluate(target, sc, x_q.value())?;
    let mc = sc.monte_carlo().with_backend(backend);
    let mut outputs = Vec::with_capacity(nominal.len());
    for (i, &(name, value, dim)) in nominal.iter().enumerate() {
        let sigma = if x_q.sigma() > 0.0 {
            let f = |x: &[f64]| evaluate(target, sc, x[0]).map_or(f64::NAN, |o| o[i].1);
            propagate_monte_carlo(f, &[x_q], dim, &mc)?.quantity.sigma()
        } else {
            0.0
        };
        outputs.push((name, UncertainQuantity::new(value, sigma, dim)?));
    }
    let mut notes = Vec::new();
    if target == BudgetTarget::Gate {
        let v = gate_detuning_verdict(&sc.trap_config()?, &sc.charge_scenario()?, &sc.gate_params()?)?;
        notes.push(format!(
            "scenario charges {} within the δ_x/Ω_2g threshold",
            if v.within_threshold { "are" } else { "are not" }
        ));
    }
    if target == BudgetTarget::Charging && sc.electron_rate_override()?.is_some() {
        notes.push("electron rate taken from [film].electron_rate_per_s, not from the photon count".into());
    }
    Ok(BudgetReport {
        target,
        scenario: sc.name.clone(),
        seed: sc.seed,
        samples: mc.samples,
        sweep: sweep(target, sc, &nominal, backend)?,
        outputs,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{parse_scenario, PAPER_YB};

    fn paper() -> Scenario {
        let mut s = parse_scenario(PAPER_YB).unwrap();
        s.mc_samples = 2000;
        s
    }

    #[test]
    fn target_names_round_trip() {
        for t in BudgetTarget::ALL {
            assert_eq!(t.name().parse::<BudgetTarget>().unwrap(), t);
        }
        assert!("nope".parse::<BudgetTarget>().is_err());
    }

    #[test]
    fn every_target_runs() {
        let sc = paper();
        for t in BudgetTarget::ALL {
            let r = run_budget(&sc, t, Backend::default()).unwrap();
            assert_eq!(r.sweep.points.len(), SWEEP_POINTS);
            assert!(r.outputs.iter().all(|(_, q)| q.value().is_finite()));
            let csv = r.sweep.to_csv();
            assert!(csv.lines().next().unwrap().contains('_'));
        }
    }

    #[test]
    fn reference_values() {
        let sc = paper();
        let q = |t, n| run_budget(&sc, t, Backend::default()).unwrap().output(n).unwrap();
        let cool = q(BudgetTarget::Cooling, "q1_max");
        assert!((cool.value() / 1400.0 - 1.0).abs() < 0.05);
        assert!(cool.sigma() > 0.0);
        let coh = q(BudgetTarget::RydbergCoherence, "q1_max");
        assert!((coh.value() / 54.0 - 1.0).abs() < 0.05, "{}", coh.value());
        let charge = q(BudgetTarget::Charging, "charge");
        assert!((120.0..=135.0).contains(&charge.value()), "{}", charge.value());
    }

    #[test]
    fn missing_section_is_schema_error() {
        let sc = parse_scenario("name = \"bare\"\n[charges]\nq1_e = 1.0\nq2_e = 0.0\nxq_m = 2e-4\n").unwrap();
        let e = run_budget(&sc, BudgetTarget::Cooling, Backend::default()).unwrap_err();
        assert!(matches!(&e, Error::Schema(m) if m.contains("[trap]")), "{e}");
    }

    #[test]
    fn backends_agree() {
        let sc = paper();
        let a = run_budget(&sc, BudgetTarget::LambDicke, Backend::Sequential).unwrap();
        let b = run_budget(&sc, BudgetTarget::LambDicke, Backend::default()).unwrap();
        assert_eq!(a, b);
    }
}
