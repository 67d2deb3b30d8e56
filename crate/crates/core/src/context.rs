use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// CODATA 2018 inverse fine-structure constant, rounded the way it is
/// usually quoted in the atomic-physics literature.
pub const ALPHA_INV_DEFAULT: f64 = 137.035_999;
pub const ALPHA_DEFAULT: f64 = 1.0 / ALPHA_INV_DEFAULT;

pub const BOHR_RADIUS_M: f64 = 5.291_772_109_03e-11;
pub const HARTREE_J: f64 = 4.359_744_722_207_1e-18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    /// ħ = mₑ = e = 1: lengths in Bohr radii, energies in hartree.
    Atomic,
    /// ħ = c = mₑ = 1: lengths in reduced Compton wavelengths (α a₀),
    /// energies in mₑc² (1/α² hartree).
    Relativistic,
    /// Metres and joules.
    SiFactors,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Charges {
    /// Point nucleus of charge Q acting on a unit probe charge.
    Nuclear { q: f64 },
    /// Two point charges q₁, q₂.
    Pair { q1: f64, q2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalContext {
    pub alpha: f64,
    pub charges: Charges,
    /// Reduced mass in units of mₑ.
    pub reduced_mass: f64,
    pub unit_system: UnitSystem,
}

impl Default for PhysicalContext {
    fn default() -> Self {
        Self::nuclear(1.0)
    }
}

impl PhysicalContext {
    pub fn nuclear(q: f64) -> Self {
        Self {
            alpha: ALPHA_DEFAULT,
            charges: Charges::Nuclear { q },
            reduced_mass: 1.0,
            unit_system: UnitSystem::Atomic,
        }
    }

    pub fn pair(q1: f64, q2: f64) -> Self {
        Self {
            charges: Charges::Pair { q1, q2 },
            ..Self::nuclear(1.0)
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_reduced_mass(mut self, mu: f64) -> Self {
        self.reduced_mass = mu;
        self
    }

    pub fn with_units(mut self, units: UnitSystem) -> Self {
        self.unit_system = units;
        self
    }

    /// α may be zero (all radiative corrections switched off) but not
    /// negative.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(domain("PhysicalContext", format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.reduced_mass > 0.0) || !self.reduced_mass.is_finite() {
            return Err(domain(
                "PhysicalContext",
                format!("reduced mass must be positive, got {}", self.reduced_mass),
            ));
        }
        let finite = match self.charges {
            Charges::Nuclear { q } => q.is_finite(),
            Charges::Pair { q1, q2 } => q1.is_finite() && q2.is_finite(),
        };
        if !finite {
            return Err(domain("PhysicalContext", "charges must be finite"));
        }
        Ok(())
    }

    /// Q in nuclear mode, q₁q₂ in pair mode. Every potential is linear
    /// (Uehling) or cubic (Wichmann-Kroll) in this number.
    pub fn charge_product(&self) -> f64 {
        match self.charges {
            Charges::Nuclear { q } => q,
            Charges::Pair { q1, q2 } => q1 * q2,
        }
    }

    pub fn is_nuclear(&self) -> bool {
        matches!(self.charges, Charges::Nuclear { .. })
    }

    /// Length unit of `unit_system` expressed in bohr.
    pub fn length_unit_bohr(&self) -> f64 {
        match self.unit_system {
            UnitSystem::Atomic => 1.0,
            UnitSystem::Relativistic => self.alpha,
            UnitSystem::SiFactors => 1.0 / BOHR_RADIUS_M,
        }
    }

    /// Energy unit of `unit_system` expressed in hartree.
    pub fn energy_unit_hartree(&self) -> f64 {
        match self.unit_system {
            UnitSystem::Atomic => 1.0,
            UnitSystem::Relativistic => 1.0 / (self.alpha * self.alpha),
            UnitSystem::SiFactors => 1.0 / HARTREE_J,
        }
    }

    pub fn length_to_atomic(&self, x: f64) -> f64 {
        x * self.length_unit_bohr()
    }

    pub fn length_from_atomic(&self, r: f64) -> f64 {
        r / self.length_unit_bohr()
    }

    pub fn energy_to_atomic(&self, e: f64) -> f64 {
        e * self.energy_unit_hartree()
    }

    pub fn energy_from_atomic(&self, e: f64) -> f64 {
        e / self.energy_unit_hartree()
    }
}
