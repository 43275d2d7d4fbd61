//! Unit handling at the CLI boundary.
//!
//! The library is unit-free (hbar = c = 1). `--units natural` passes
//! numbers through untouched. `--units mev-fm` interprets CLI masses in
//! MeV and keeps lengths in fm and times in fm/c, converting masses to
//! inverse femtometers on the way in via hbar c = 197.3269804 MeV fm.

pub const HBAR_C_MEV_FM: f64 = 197.326_980_4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Units {
    /// Dimensionless natural units; all quantities as given.
    Natural,
    /// Masses in MeV, lengths in fm, times in fm/c.
    MevFm,
}

impl Units {
    pub fn mass_to_natural(self, mass: f64) -> f64 {
        match self {
            Units::Natural => mass,
            Units::MevFm => mass / HBAR_C_MEV_FM,
        }
    }

    pub fn note(self) -> &'static str {
        match self {
            Units::Natural => "hbar = c = 1; all quantities dimensionless",
            Units::MevFm => {
                "masses given in MeV (converted by hbar c = 197.3269804 MeV fm); lengths in fm, times in fm/c"
            }
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Units::Natural => "natural",
            Units::MevFm => "mev-fm",
        }
    }
}
