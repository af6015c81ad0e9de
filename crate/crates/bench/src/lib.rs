//! Shared fixtures for the benchmarks.

use scatterbound::{build_dispersion, Dispersion, PotentialSpec, UnitsConvention};

/// A named potential at one energy above both asymptotes.
pub struct Fixture {
    pub name: &'static str,
    pub potential: PotentialSpec,
    pub energy: f64,
}

impl Fixture {
    pub fn dispersion(&self) -> Dispersion {
        build_dispersion(&self.potential, self.energy, UnitsConvention::default())
            .expect("fixture energies are above the asymptotes")
    }
}

pub fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture { name: "delta", potential: PotentialSpec::Delta { g: 1.0, x0: 0.0 }, energy: 1.0 },
        Fixture {
            name: "square-barrier",
            potential: PotentialSpec::SquareBarrier { v0: 1.0, width: 1.0 },
            energy: 0.5,
        },
        Fixture {
            name: "tanh",
            potential: PotentialSpec::Tanh { v_minus: 0.0, v_plus: 0.5, length: 1.0 },
            energy: 1.0,
        },
        Fixture { name: "sech2", potential: PotentialSpec::Sech2 { ve: 1.0, length: 1.0 }, energy: 0.8 },
        Fixture {
            name: "poschl-teller",
            potential: PotentialSpec::PoschlTeller { v0: 1.0, v_inf: 0.3, length: 1.0 },
            energy: 1.2,
        },
    ]
}
