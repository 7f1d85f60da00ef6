//! The named experiments. Each module owns a parameter struct with desk-scale
//! defaults, its range checks, and a `run` producing tables and checks.

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::{ExperimentName, Issues};
use crate::report::Check;
use crate::table::Table;

pub mod fields;
pub mod gprob;
pub mod grassmann;
pub mod kernel;
pub mod operators;
pub mod pathint;
pub mod schrod;

#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    GprobBorn(gprob::GprobBorn),
    Uncertainty(operators::Uncertainty),
    KernelConsistency(kernel::KernelConsistency),
    PacketSpread(schrod::PacketSpread),
    StationaryStates(schrod::StationaryStates),
    Ehrenfest(schrod::Ehrenfest),
    PropagatorCompare(pathint::PropagatorCompare),
    LeastAction(pathint::LeastAction),
    KgModes(fields::KgModes),
    MaxwellModes(fields::MaxwellModes),
    ProcaModes(fields::ProcaModes),
    FieldCcr(fields::FieldCcr),
    FermiOscillator(grassmann::FermiOscillator),
    DiracModes(grassmann::DiracModes),
}

fn typed<T: DeserializeOwned>(text: &str) -> Result<T, serde_path_to_error::Error<serde_json::Error>> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de)
}

impl Params {
    pub fn parse(name: ExperimentName, text: &str) -> Result<Self, serde_path_to_error::Error<serde_json::Error>> {
        use ExperimentName as E;
        Ok(match name {
            E::GprobBorn => Self::GprobBorn(typed(text)?),
            E::Uncertainty => Self::Uncertainty(typed(text)?),
            E::KernelConsistency => Self::KernelConsistency(typed(text)?),
            E::PacketSpread => Self::PacketSpread(typed(text)?),
            E::StationaryStates => Self::StationaryStates(typed(text)?),
            E::Ehrenfest => Self::Ehrenfest(typed(text)?),
            E::PropagatorCompare => Self::PropagatorCompare(typed(text)?),
            E::LeastAction => Self::LeastAction(typed(text)?),
            E::KgModes => Self::KgModes(typed(text)?),
            E::MaxwellModes => Self::MaxwellModes(typed(text)?),
            E::ProcaModes => Self::ProcaModes(typed(text)?),
            E::FieldCcr => Self::FieldCcr(typed(text)?),
            E::FermiOscillator => Self::FermiOscillator(typed(text)?),
            E::DiracModes => Self::DiracModes(typed(text)?),
        })
    }

    pub fn defaults(name: ExperimentName) -> Self {
        Self::parse(name, "{}").expect("every parameter has a default")
    }

    pub fn check(&self) -> Vec<(String, String)> {
        let mut issues = Issues::default();
        match self {
            Self::GprobBorn(p) => p.check(&mut issues),
            Self::Uncertainty(p) => p.check(&mut issues),
            Self::KernelConsistency(p) => p.check(&mut issues),
            Self::PacketSpread(p) => p.check(&mut issues),
            Self::StationaryStates(p) => p.check(&mut issues),
            Self::Ehrenfest(p) => p.check(&mut issues),
            Self::PropagatorCompare(p) => p.check(&mut issues),
            Self::LeastAction(p) => p.check(&mut issues),
            Self::KgModes(p) => p.check(&mut issues),
            Self::MaxwellModes(p) => p.check(&mut issues),
            Self::ProcaModes(p) => p.check(&mut issues),
            Self::FieldCcr(p) => p.check(&mut issues),
            Self::FermiOscillator(p) => p.check(&mut issues),
            Self::DiracModes(p) => p.check(&mut issues),
        }
        issues.0
    }

    pub fn run(&self) -> dimech_core::Result<Outcome> {
        match self {
            Self::GprobBorn(p) => p.run(),
            Self::Uncertainty(p) => p.run(),
            Self::KernelConsistency(p) => p.run(),
            Self::PacketSpread(p) => p.run(),
            Self::StationaryStates(p) => p.run(),
            Self::Ehrenfest(p) => p.run(),
            Self::PropagatorCompare(p) => p.run(),
            Self::LeastAction(p) => p.run(),
            Self::KgModes(p) => p.run_klein_gordon(),
            Self::MaxwellModes(p) => p.run(),
            Self::ProcaModes(p) => p.run_proca(),
            Self::FieldCcr(p) => p.run(),
            Self::FermiOscillator(p) => p.run(),
            Self::DiracModes(p) => p.run(),
        }
    }
}
