//! Key tables for each scenario section. Order here is the canonical
//! serialization order.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Check {
    Positive,
    NonNegative,
    /// Closed interval [0, 1].
    Fraction,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Kind {
    Float(Check),
    Int,
    FloatList(Check),
    TextList,
}

#[derive(Debug, Clone, Copy)]
pub(super) struct KeySpec {
    pub key: &'static str,
    pub kind: Kind,
    pub required: bool,
}

#[derive(Debug, Clone, Copy)]
pub(super) struct SectionSpec {
    pub name: &'static str,
    pub keys: &'static [KeySpec],
}

const fn req(key: &'static str, kind: Kind) -> KeySpec {
    KeySpec {
        key,
        kind,
        required: true,
    }
}

const fn opt(key: &'static str, kind: Kind) -> KeySpec {
    KeySpec {
        key,
        kind,
        required: false,
    }
}

use Check::*;
use Kind::*;

/// Unit suffixes recognised on key names.
pub(super) const UNIT_SUFFIXES: &[&str] = &[
    "_hz", "_m", "_e", "_amu", "_s", "_w", "_f", "_ohm_m", "_per_s", "_v_per_m",
];

pub(super) const SECTIONS: &[SectionSpec] = &[
    SectionSpec {
        name: "cavity",
        keys: &[
            req("f00", Float(Positive)),
            req("f00_sigma", Float(NonNegative)),
            opt("labels", TextList),
            opt("finesse", FloatList(Positive)),
            opt("finesse_sigma", FloatList(NonNegative)),
            opt("fsr_hz", Float(Positive)),
            opt("fsr_sigma_hz", Float(NonNegative)),
            opt("length_m", Float(Positive)),
            req("thickness_m", Float(Positive)),
            opt("thickness_sigma_m", Float(NonNegative)),
            req("wavelength_m", Float(Positive)),
        ],
    },
    SectionSpec {
        name: "trap",
        keys: &[
            req("mass_amu", Float(Positive)),
            req("secular_hz", Float(Positive)),
            req("rf_hz", Float(Positive)),
            req("cooling_wavelength_m", Float(Positive)),
            req("gate_wavelength_m", Float(Positive)),
            req("cavity_wavelength_m", Float(Positive)),
            opt("intensity_floor", Float(Fraction)),
            opt("coupling_fraction", Float(Positive)),
            opt("lamb_dicke_limit", Float(Positive)),
            opt("gate_rabi_hz", Float(Positive)),
            opt("gate_occupation", Int),
            opt("gate_threshold", Float(Positive)),
        ],
    },
    SectionSpec {
        name: "charges",
        keys: &[
            req("q1_e", Float(Any)),
            req("q2_e", Float(Any)),
            req("xq_m", Float(Positive)),
            opt("xq_sigma_m", Float(NonNegative)),
        ],
    },
    SectionSpec {
        name: "rydberg",
        keys: &[
            // Hz/(V/m)²
            req("alpha", Float(Positive)),
            req("rabi_hz", Float(Positive)),
            opt("target_infidelity", Float(Positive)),
            opt("coherence_time_s", Float(Positive)),
        ],
    },
    SectionSpec {
        name: "film",
        keys: &[
            req("resistivity_ohm_m", Float(Positive)),
            req("thickness_m", Float(Positive)),
            req("radius_m", Float(Positive)),
            opt("capacitance_f", Float(Positive)),
            opt("electron_rate_per_s", Float(NonNegative)),
        ],
    },
    SectionSpec {
        name: "illumination",
        keys: &[
            req("power_w", Float(NonNegative)),
            req("wavelength_m", Float(Positive)),
            req("efficiency", Float(Fraction)),
            req("waist_m", Float(Positive)),
        ],
    },
];

pub(super) fn section(name: &str) -> Option<&'static SectionSpec> {
    SECTIONS.iter().find(|s| s.name == name)
}

/// Key name without its unit suffix, if it has one.
pub(super) fn stem(key: &str) -> (&str, Option<&'static str>) {
    UNIT_SUFFIXES
        .iter()
        .filter(|s| key.ends_with(*s) && key.len() > s.len())
        .max_by_key(|s| s.len())
        .map(|s| (&key[..key.len() - s.len()], Some(*s)))
        .unwrap_or((key, None))
}
