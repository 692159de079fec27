//! Computational tools for locally conformally symplectic geometry.
//!
//! - [`ring`]: exact Laurent polynomials over Q and F₂, ranks over `F(t)`.
//! - [`novikov`]: Novikov Betti numbers of cell complexes with an integral
//!   class, and the Morse–Novikov complex on the circle.
//! - [`calculus`]: forms on `Tⁿ` and `T*Tⁿ`, `d_η`, gauge transformations,
//!   Hamiltonian, Lee, Liouville and Reeb fields.
//! - [`dynamics`]: RK4 flows, fiber displaceability and the Moser method.
//! - [`families`]: β-critical points of generating families and the
//!   comparison with Novikov ranks.

pub mod calculus;
pub mod dynamics;
pub mod families;
pub mod novikov;
pub mod ring;

pub use calculus::CalculusError;
pub use dynamics::DynamicsError;
pub use families::FamilyError;
pub use novikov::HomologyError;
pub use ring::RingError;

/// Any typed error of the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

impl Error {
    /// A stable identifier such as `"homology.NotACocycle"`: the module
    /// and the innermost variant name.
    pub fn kind(&self) -> String {
        let (module, debug) = match self {
            Error::Ring(e) => ("ring", format!("{e:?}")),
            Error::Homology(e) => ("homology", format!("{e:?}")),
            Error::Calculus(e) => ("calculus", format!("{e:?}")),
            Error::Dynamics(e) => ("dynamics", format!("{e:?}")),
            Error::Family(e) => ("family", format!("{e:?}")),
        };
        let mut rest = debug.as_str();
        let mut module = module;
        loop {
            let end = rest.find(|c: char| !c.is_alphanumeric() && c != '_').unwrap_or(rest.len());
            let name = &rest[..end];
            let wrapped = match name {
                "Ring" => Some("ring"),
                "Homology" => Some("homology"),
                "Calculus" => Some("calculus"),
                _ => None,
            };
            match wrapped {
                Some(m) if rest[end..].starts_with('(') => {
                    module = m;
                    rest = &rest[end + 1..];
                }
                _ => return format!("{module}.{name}"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds() {
        let e: Error = HomologyError::NotClosedManifold.into();
        assert_eq!(e.kind(), "homology.NotClosedManifold");
        let e: Error = FamilyError::Calculus(CalculusError::EtaNotClosed).into();
        assert_eq!(e.kind(), "calculus.EtaNotClosed");
        let e: Error = DynamicsError::VanishingBeta { point: vec![0.0] }.into();
        assert_eq!(e.kind(), "dynamics.VanishingBeta");
    }
}
