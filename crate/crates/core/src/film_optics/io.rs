use std::io::Read;
use std::path::Path;

use super::{photon_energy_ev, AbsorptionSpectrum, ComplexIndex};
use crate::{Error, Result};

/// Contents of a spectrum CSV, in whichever form the header declared.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumData {
    /// `wavelength_nm,n,kappa`
    Index(Vec<ComplexIndex>),
    /// `energy_eV,alpha_per_cm`
    Absorption(AbsorptionSpectrum),
}

impl SpectrumData {
    /// Absorption spectrum view; index tables are converted with `α = 4πκ/λ`
    /// and sorted by photon energy.
    pub fn to_absorption(&self) -> Result<AbsorptionSpectrum> {
        match self {
            SpectrumData::Absorption(s) => Ok(s.clone()),
            SpectrumData::Index(rows) => {
                let mut pts: Vec<(f64, f64)> = rows
                    .iter()
                    .map(|r| (photon_energy_ev(r.wavelength), r.absorption_coefficient()))
                    .collect();
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                AbsorptionSpectrum::new(pts)
            }
        }
    }
}

enum Layout {
    Index,
    Absorption,
}

pub fn parse_spectrum_csv<R: Read>(reader: R) -> Result<SpectrumData> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Io(e.to_string()))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let layout = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["wavelength_nm", "n", "kappa"] => Layout::Index,
        ["energy_ev", "alpha_per_cm"] => Layout::Absorption,
        other => {
            return Err(Error::Schema(format!(
                "unrecognised spectrum header {other:?}; expected wavelength_nm,n,kappa or energy_eV,alpha_per_cm"
            )))
        }
    };
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
        let vals = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::param(format!("row {}: {e}", i + 1)))?;
        rows.push(vals);
    }
    if rows.is_empty() {
        return Err(Error::param("spectrum has no data rows"));
    }
    match layout {
        Layout::Index => rows
            .into_iter()
            .map(|v| ComplexIndex::new(v[1], v[2], v[0] * 1e-9))
            .collect::<Result<Vec<_>>>()
            .map(SpectrumData::Index),
        // α is stored per cm in the file and per m in memory.
        Layout::Absorption => {
            AbsorptionSpectrum::new(rows.into_iter().map(|v| (v[0], v[1] * 100.0)).collect())
                .map(SpectrumData::Absorption)
        }
    }
}

pub fn read_spectrum_csv(path: impl AsRef<Path>) -> Result<SpectrumData> {
    let f = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_spectrum_csv(f)
}
