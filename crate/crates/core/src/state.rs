use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The four maximally entangled two-party states.
///
/// Each variant fixes how station B's hidden variable is derived from
/// station A's, both for the vector model ([`crate::hv::partner_hv`]) and
/// for the Boolean model ([`crate::boolean::boolean_partner`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellState {
    #[default]
    PsiMinus,
    PsiPlus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiMinus,
        BellState::PsiPlus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BellState::PsiMinus => "psi-minus",
            BellState::PsiPlus => "psi-plus",
            BellState::PhiPlus => "phi-plus",
            BellState::PhiMinus => "phi-minus",
        }
    }

    /// Ψ states pair orthogonal axes across the stations, Φ states equal axes.
    pub fn is_psi(self) -> bool {
        matches!(self, BellState::PsiMinus | BellState::PsiPlus)
    }

    /// `true` for the antisymmetric-sign states Ψ⁻ and Φ⁻.
    pub fn is_minus(self) -> bool {
        matches!(self, BellState::PsiMinus | BellState::PhiMinus)
    }

    /// The coincidence law of this state depends on `α + β` rather than `α − β`.
    pub fn uses_angle_sum(self) -> bool {
        matches!(self, BellState::PsiPlus | BellState::PhiMinus)
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BellState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "psi-minus" | "psi-" => Ok(BellState::PsiMinus),
            "psi-plus" | "psi+" => Ok(BellState::PsiPlus),
            "phi-plus" | "phi+" => Ok(BellState::PhiPlus),
            "phi-minus" | "phi-" => Ok(BellState::PhiMinus),
            other => Err(Error::Config(format!("unknown Bell state `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in BellState::ALL {
            assert_eq!(s.name().parse::<BellState>().unwrap(), s);
        }
        assert_eq!("PSI_MINUS".parse::<BellState>().unwrap(), BellState::PsiMinus);
        assert!("chi-plus".parse::<BellState>().is_err());
    }
}
