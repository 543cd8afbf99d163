use std::collections::{BTreeSet, HashMap};

use super::{manifest, ManifestRow, ReportRow, Status};
use crate::cavity_optics::extinction_from_finesse;
use crate::charging::{
    equilibrium_charge, film_resistance, gaussian_clipping_factor, photocurrent, transport_consistency,
    FilmSample, Photocurrent, TransportSample,
};
use crate::electrostatics::{disc_point_ratios, ChargeScenario};
use crate::film_optics::{drude_index, DrudeModel, DEFAULT_EFFECTIVE_MASS_RATIO, DEFAULT_EPS_INF};
use crate::ion_impact::{
    gate_detuning_verdict, ion_response, lamb_dicke_budget, max_charge_for_cooling,
    max_symmetric_charge_for_gate, zero_point_spread,
};
use crate::ringdown::{finesse, fit_ensemble, synthesize_trace, AmplitudeMode};
use crate::rydberg_impact::{max_charge_for_infidelity, rydberg_response};
use crate::scenario::{parse_scenario, Scenario, PAPER_YB};
use crate::{Backend, Dimension, Error, MonteCarlo, Result, UncertainQuantity};

/// Rows whose printed value is known not to follow from the stated inputs.
pub const DOCUMENTED_MISMATCHES: [&str; 3] = ["kappa_zno_128d", "gate_claim", "photon_rate"];

const SYNTHETIC_TRACES: u64 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct PaperReport {
    pub rows: Vec<ReportRow>,
    pub seed: u64,
    pub samples: usize,
}

impl PaperReport {
    pub fn undocumented(&self) -> Vec<&ReportRow> {
        self.rows.iter().filter(|r| r.status == Status::Mismatch).collect()
    }

    pub fn documented(&self) -> BTreeSet<&str> {
        self.rows
            .iter()
            .filter(|r| r.status == Status::MismatchDocumented)
            .map(|r| r.id.as_str())
            .collect()
    }

    /// No undocumented mismatch, and exactly the known discrepancies flagged.
    pub fn passed(&self) -> bool {
        self.undocumented().is_empty()
            && self.documented() == DOCUMENTED_MISMATCHES.into_iter().collect()
    }

    pub fn row(&self, id: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.id == id)
    }
}

struct Builder {
    specs: HashMap<String, ManifestRow>,
    rows: Vec<ReportRow>,
}

impl Builder {
    fn push(&mut self, id: &str, computed: UncertainQuantity) -> Result<()> {
        let spec = self
            .specs
            .remove(id)
            .ok_or_else(|| Error::Schema(format!("manifest has no row {id}")))?;
        self.rows.push(ReportRow::evaluate(&spec, computed));
        Ok(())
    }

    fn exact(&mut self, id: &str, v: f64, d: Dimension) -> Result<()> {
        self.push(id, UncertainQuantity::new(v, 0.0, d)?)
    }
}

fn uq(v: f64, s: f64, d: Dimension) -> Result<UncertainQuantity> {
    UncertainQuantity::new(v, s, d)
}

/// Recomputes every tabulated and quoted figure from its inputs.
pub fn reproduce_paper(seed: u64, samples: usize, backend: Backend) -> Result<PaperReport> {
    use Dimension::*;
    let sc: Scenario = parse_scenario(PAPER_YB)?;
    let mc = MonteCarlo::new(samples, seed).with_backend(backend);
    let mut b = Builder {
        specs: manifest()?.into_iter().map(|r| (r.id.clone(), r)).collect(),
        rows: Vec::new(),
    };

    // Film extinction from the finesse table.
    let f00 = sc.reference_finesse()?;
    let h = sc.film_thickness()?;
    let wl = sc.probe_wavelength()?;
    let ids = ["kappa_zno_27d", "kappa_zno_69d", "kappa_zno_128d", "kappa_a_69d", "kappa_a_128d"];
    let entries = sc.finesse_entries()?;
    if entries.len() != ids.len() {
        return Err(Error::Schema("bundled scenario must list five finesse entries".into()));
    }
    let mut excess = Vec::new();
    for (id, e) in ids.iter().zip(&entries) {
        let ext = extinction_from_finesse(&f00, &e.finesse, &h, wl, &mc)?;
        b.push(id, ext.kappa)?;
        excess.push(ext.excess_loss);
    }
    b.exact("excess_zno_69d", excess[1], Dimensionless)?;
    b.exact("excess_zno_128d", excess[2], Dimensionless)?;

    let lw = uq(523e3, 9e3, Frequency)?;
    b.push("finesse_27d", finesse(&lw, &sc.fsr()?)?)?;

    let traces = (0..SYNTHETIC_TRACES)
        .map(|i| synthesize_trace(1.0, 523e3, 2e-6, 5e8, 0.01, seed.wrapping_add(i)))
        .collect::<Result<Vec<_>>>()?;
    b.push(
        "ringdown_synthetic",
        fit_ensemble(&traces, AmplitudeMode::PerTrace, backend)?.linewidth,
    )?;

    let disc = disc_point_ratios(125e-6, 200e-6)?;
    b.exact("disc_u_ratio", disc.u_ratio, Dimensionless)?;
    b.exact("disc_e_ratio", disc.e_ratio, Dimensionless)?;

    // Trapped ion.
    let trap = sc.trap_config()?;
    let x_q = sc.x_q()?.value();
    let cool = max_charge_for_cooling(&trap, x_q, sc.trap_setting("intensity_floor", 0.5)?)?;
    b.exact("cooling_q1", cool.q1_max, ElementaryCharge)?;
    b.exact("cooling_field", cool.response.field, Field)?;
    b.exact("cooling_x", cool.response.x_eq, Length)?;
    let coupled = ion_response(&trap, &ChargeScenario::single(100.0, x_q)?)?;
    b.exact("coupling_x", coupled.x_eq, Length)?;
    b.exact("coupling_field", coupled.field, Field)?;
    let ld = lamb_dicke_budget(&trap, x_q, sc.trap_setting("lamb_dicke_limit", 0.2)?)?;
    b.exact("lamb_dicke_q1", ld.q1_max, ElementaryCharge)?;
    b.exact("lamb_dicke_field", ld.field, Field)?;
    b.exact("lamb_dicke_x", ld.x_eq_max, Length)?;
    b.exact("lamb_dicke_micromotion", ld.micromotion_max, Length)?;
    b.exact("zero_point", zero_point_spread(trap.mass, trap.secular_frequency)?, Length)?;
    let gate = sc.gate_params()?;
    let v = gate_detuning_verdict(&trap, &ChargeScenario::new(630.0, 630.0, x_q)?, &gate)?;
    b.exact("gate_fractional", v.fractional_shift, Dimensionless)?;
    b.exact("gate_claim", v.ratio, Dimensionless)?;
    b.exact("gate_bound", max_symmetric_charge_for_gate(&trap, x_q, &gate)?, ElementaryCharge)?;

    // Rydberg atom.
    let ryd = sc.rydberg_config()?;
    let r54 = rydberg_response(&ryd, 54.0, x_q)?;
    b.exact("rydberg_field", r54.field, Field)?;
    b.exact("rydberg_shift", r54.shift_hz, Frequency)?;
    b.exact("rydberg_tau", r54.decoherence_time, Time)?;
    let target = sc.rydberg_setting("target_infidelity")?.unwrap_or(0.01);
    let rg = max_charge_for_infidelity(&ryd, target, x_q)?;
    b.exact("rydberg_gate_q1", rg.q1, ElementaryCharge)?;
    b.exact("rydberg_gate_field", rg.field, Field)?;

    // Film charging.
    let film: FilmSample = sc.film_sample()?;
    let r = film_resistance(&film).resistance;
    b.exact("film_resistance", r, Resistance)?;
    let quoted = Photocurrent::from_rate(sc.electron_rate_override()?.unwrap_or(4e11))?;
    let q = equilibrium_charge(r, film.capacitance_to_ground, quoted.current)?;
    b.exact("equilibrium_charge", q.charge_e, ElementaryCharge)?;
    b.exact("rc_time", q.rc_time, Time)?;
    let ill = sc.illumination()?;
    let clip = gaussian_clipping_factor(ill.beam_waist, ill.mirror_distance)?;
    b.exact("clipping", clip, Dimensionless)?;
    let rate = photocurrent(&ill).rate;
    b.exact("photon_rate", rate, Frequency)?;
    b.exact("photon_rate_clipped", rate * clip, Frequency)?;

    // Hall data.
    let zno1 = TransportSample::from_lab_units(8.6, 2e19, 37.0)?;
    let zno2 = TransportSample::from_lab_units(13.2, 1.5e19, 28.0)?;
    b.exact("zno1_resistivity", transport_consistency(&zno1).predicted_resistivity, Resistivity)?;
    b.exact("zno2_resistivity", transport_consistency(&zno2).predicted_resistivity, Resistivity)?;
    let drude = DrudeModel::from_transport(
        DEFAULT_EPS_INF,
        zno1.carrier_density,
        zno1.mobility,
        DEFAULT_EFFECTIVE_MASS_RATIO,
    )?;
    b.exact("drude_kappa", drude_index(&drude, wl)?.kappa, Dimensionless)?;

    if let Some(id) = b.specs.keys().next() {
        return Err(Error::Schema(format!("manifest row {id} was not computed")));
    }
    Ok(PaperReport {
        rows: b.rows,
        seed,
        samples,
    })
}
