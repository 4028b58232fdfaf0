//! Refrigerator models: particles, baths, free and interaction Hamiltonians.

mod params;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use params::{ModelIIIParams, ModelIIParams, ModelIParams, ModelParams};

use crate::error::{FridgeError, Result};
use crate::tensor::{
    self, commutator, diag, embed, insert_factor, ket_bra, max_abs, partial_trace, ComplexMatrix,
    SpaceShape,
};

/// Coupling strengths or rates at or above this fraction of the smallest level
/// spacing fall outside the weak-coupling regime of the reset model.
pub const VALIDITY_FRACTION: f64 = 0.1;

/// How a particle exchanges energy with one bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelKind {
    /// With probability `rate` per unit time the particle is replaced by its
    /// thermal state at the bath temperature.
    FullReset,
    /// A pair of Lindblad jumps on one transition (`lower < upper`), with rates
    /// obeying detailed balance at the bath temperature.
    TransitionJump { lower: usize, upper: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathChannel {
    pub kind: ChannelKind,
    pub temperature: f64,
    pub rate: f64,
}

impl BathChannel {
    pub fn full_reset(temperature: f64, rate: f64) -> Result<Self> {
        let channel = Self {
            kind: ChannelKind::FullReset,
            temperature,
            rate,
        };
        channel.validate()?;
        Ok(channel)
    }

    pub fn transition_jump(lower: usize, upper: usize, temperature: f64, rate: f64) -> Result<Self> {
        let channel = Self {
            kind: ChannelKind::TransitionJump { lower, upper },
            temperature,
            rate,
        };
        channel.validate()?;
        Ok(channel)
    }

    fn validate(&self) -> Result<()> {
        if !(self.rate >= 0.0) || !self.rate.is_finite() {
            return Err(FridgeError::InvalidParameter {
                name: "rate".into(),
                reason: format!("must be finite and non-negative, got {}", self.rate),
            });
        }
        if !(self.temperature > 0.0) {
            return Err(FridgeError::NonPositiveTemperature(self.temperature));
        }
        if let ChannelKind::TransitionJump { lower, upper } = self.kind {
            if lower >= upper {
                return Err(FridgeError::InvalidParameter {
                    name: "transition".into(),
                    reason: format!("requires lower < upper, got ({lower}, {upper})"),
                });
            }
            if self.temperature.is_infinite() {
                return Err(FridgeError::InvalidParameter {
                    name: "temperature".into(),
                    reason: "a transition channel needs a finite bath temperature".into(),
                });
            }
        }
        Ok(())
    }
}

/// One subsystem: its level energies (ground at zero) and bath channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpec {
    pub energies: Vec<f64>,
    pub baths: Vec<BathChannel>,
}

impl ParticleSpec {
    pub fn new(energies: Vec<f64>, baths: Vec<BathChannel>) -> Result<Self> {
        if energies.len() != 2 && energies.len() != 3 {
            return Err(FridgeError::InvalidParameter {
                name: "energies".into(),
                reason: format!("a particle has 2 or 3 levels, got {}", energies.len()),
            });
        }
        if energies[0] != 0.0 {
            return Err(FridgeError::InvalidParameter {
                name: "energies".into(),
                reason: "ground level must sit at zero energy".into(),
            });
        }
        if energies.iter().any(|e| !e.is_finite()) || energies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FridgeError::InvalidParameter {
                name: "energies".into(),
                reason: format!("levels must be finite and strictly increasing, got {energies:?}"),
            });
        }
        for bath in &baths {
            bath.validate()?;
            if let ChannelKind::TransitionJump { upper, .. } = bath.kind {
                if upper >= energies.len() {
                    return Err(FridgeError::InvalidParameter {
                        name: "transition".into(),
                        reason: format!("level {upper} does not exist"),
                    });
                }
            }
        }
        Ok(Self { energies, baths })
    }

    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    /// Smallest spacing between adjacent levels.
    pub fn min_gap(&self) -> f64 {
        self.energies
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn local_hamiltonian(&self) -> ComplexMatrix {
        diag(&self.energies)
    }

    pub fn total_rate(&self) -> f64 {
        self.baths.iter().map(|b| b.rate).sum()
    }
}

/// `coupling * (|bra><ket| + |ket><bra|)` on joint configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionTerm {
    pub coupling: f64,
    pub bra: Vec<usize>,
    pub ket: Vec<usize>,
}

impl InteractionTerm {
    pub fn new(coupling: f64, bra: Vec<usize>, ket: Vec<usize>) -> Result<Self> {
        if bra == ket {
            return Err(FridgeError::InvalidParameter {
                name: "interaction".into(),
                reason: "bra and ket configurations must differ".into(),
            });
        }
        if !coupling.is_finite() {
            return Err(FridgeError::InvalidParameter {
                name: "coupling".into(),
                reason: "must be finite".into(),
            });
        }
        Ok(Self { coupling, bra, ket })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelTag {
    I,
    II,
    III,
    Custom,
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelTag::I => "I",
            ModelTag::II => "II",
            ModelTag::III => "III",
            ModelTag::Custom => "custom",
        })
    }
}

/// A complete refrigerator plus the object being cooled (particle 0).
#[derive(Debug, Clone)]
pub struct FridgeModel {
    shape: SpaceShape,
    particles: Vec<ParticleSpec>,
    interactions: Vec<InteractionTerm>,
    h0: ComplexMatrix,
    hint: ComplexMatrix,
    tag: ModelTag,
    warnings: Vec<String>,
}

impl FridgeModel {
    pub fn new(
        particles: Vec<ParticleSpec>,
        interactions: Vec<InteractionTerm>,
        tag: ModelTag,
    ) -> Result<Self> {
        let shape = SpaceShape::new(particles.iter().map(ParticleSpec::levels).collect())?;
        let n = shape.total_dim();

        let mut h0 = ComplexMatrix::zeros(n, n);
        for (i, particle) in particles.iter().enumerate() {
            h0 += embed(&particle.local_hamiltonian(), i, &shape)?;
        }

        let mut hint = ComplexMatrix::zeros(n, n);
        for term in &interactions {
            let a = shape.index_of(&term.bra)?;
            let b = shape.index_of(&term.ket)?;
            let g = Complex64::new(term.coupling, 0.0);
            hint[(a, b)] += g;
            hint[(b, a)] += g;
        }

        let warnings = validity_warnings(&particles, &interactions);
        for w in &warnings {
            warn!("model {tag}: {w}");
        }

        Ok(Self {
            shape,
            particles,
            interactions,
            h0,
            hint,
            tag,
            warnings,
        })
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.total_dim()
    }

    pub fn particles(&self) -> &[ParticleSpec] {
        &self.particles
    }

    pub fn particle(&self, index: usize) -> Result<&ParticleSpec> {
        self.shape.check_index(index)?;
        Ok(&self.particles[index])
    }

    pub fn interactions(&self) -> &[InteractionTerm] {
        &self.interactions
    }

    pub fn h0(&self) -> &ComplexMatrix {
        &self.h0
    }

    pub fn hint(&self) -> &ComplexMatrix {
        &self.hint
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        &self.h0 + &self.hint
    }

    pub fn tag(&self) -> ModelTag {
        self.tag
    }

    /// Weak-coupling regime violations found at construction.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Free Hamiltonian of one particle, lifted to the joint space.
    pub fn local_hamiltonian(&self, index: usize) -> Result<ComplexMatrix> {
        embed(&self.particle(index)?.local_hamiltonian(), index, &self.shape)
    }

    pub fn has_dissipation(&self) -> bool {
        self.particles.iter().any(|p| p.total_rate() > 0.0)
    }

    /// Largest entry of `[H0, Hint]`.
    pub fn degeneracy_defect(&self) -> f64 {
        max_abs(&commutator(&self.h0, &self.hint))
    }
}

fn validity_warnings(particles: &[ParticleSpec], interactions: &[InteractionTerm]) -> Vec<String> {
    let min_gap = particles
        .iter()
        .map(ParticleSpec::min_gap)
        .fold(f64::INFINITY, f64::min);
    let limit = VALIDITY_FRACTION * min_gap;
    let mut out = Vec::new();
    if let Some(g) = interactions
        .iter()
        .map(|t| t.coupling.abs())
        .reduce(f64::max)
        .filter(|&g| g >= limit)
    {
        out.push(format!(
            "coupling {g} is not small against the smallest level spacing {min_gap}"
        ));
    }
    for (i, particle) in particles.iter().enumerate() {
        for bath in particle.baths.iter().filter(|b| b.rate >= limit) {
            out.push(format!(
                "bath rate {} on particle {} is not small against the smallest level spacing {min_gap}",
                bath.rate,
                i + 1
            ));
        }
    }
    out
}

/// Diagonal Gibbs state over the given level energies. `temperature` may be
/// `+inf` (maximally mixed).
pub fn gibbs_state(energies: &[f64], temperature: f64) -> Result<ComplexMatrix> {
    Ok(diag(&gibbs_populations(energies, temperature)?))
}

pub fn gibbs_populations(energies: &[f64], temperature: f64) -> Result<Vec<f64>> {
    if !(temperature > 0.0) {
        return Err(FridgeError::NonPositiveTemperature(temperature));
    }
    let ground = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies
        .iter()
        .map(|e| (-(e - ground) / temperature).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / z).collect())
}

pub fn thermal_state(particle: &ParticleSpec, temperature: f64) -> Result<ComplexMatrix> {
    gibbs_state(&particle.energies, temperature)
}

/// Mean occupation of a bosonic bath mode at frequency `gap`.
pub fn bose_occupation(gap: f64, temperature: f64) -> f64 {
    1.0 / (gap / temperature).exp_m1()
}

/// Downward and upward rates of a transition channel.
pub fn jump_rates(channel: &BathChannel, particle: &ParticleSpec) -> Option<(f64, f64)> {
    match channel.kind {
        ChannelKind::FullReset => None,
        ChannelKind::TransitionJump { lower, upper } => {
            let n = bose_occupation(
                particle.energies[upper] - particle.energies[lower],
                channel.temperature,
            );
            Some((channel.rate * (n + 1.0), channel.rate * n))
        }
    }
}

/// Action of one bath channel of particle `particle_index` on `rho`.
pub fn dissipator(
    channel: &BathChannel,
    particle_index: usize,
    rho: &ComplexMatrix,
    model: &FridgeModel,
) -> Result<ComplexMatrix> {
    let n = model.dim();
    if rho.nrows() != n || rho.ncols() != n {
        return Err(FridgeError::DimensionMismatch {
            expected: n,
            found: rho.nrows(),
        });
    }
    if channel.rate == 0.0 {
        return Ok(ComplexMatrix::zeros(n, n));
    }
    let particle = model.particle(particle_index)?;
    let shape = model.shape();
    match channel.kind {
        ChannelKind::FullReset => {
            let tau = thermal_state(particle, channel.temperature)?;
            let reset = if shape.num_particles() == 1 {
                tau.scale(tensor::trace(rho).re)
            } else {
                let rest = partial_trace(rho, particle_index, shape)?;
                insert_factor(&tau, particle_index, &rest, shape)?
            };
            Ok((reset - rho).scale(channel.rate))
        }
        ChannelKind::TransitionJump { lower, upper } => {
            let (down, up) = jump_rates(channel, particle).expect("transition channel");
            let d = particle.levels();
            let lower_op = embed(&ket_bra(d, lower, upper), particle_index, shape)?;
            let raise_op = lower_op.adjoint();
            Ok(lindblad_term(&lower_op, rho).scale(down) + lindblad_term(&raise_op, rho).scale(up))
        }
    }
}

/// `L rho L^† - {L^† L, rho} / 2`.
fn lindblad_term(jump: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let jd = jump.adjoint();
    let jdj = &jd * jump;
    jump * rho * &jd - (&jdj * rho + rho * &jdj).scale(0.5)
}

/// Sum of every channel attached to one particle.
pub fn particle_dissipator(
    model: &FridgeModel,
    particle_index: usize,
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let n = model.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for channel in &model.particle(particle_index)?.baths {
        out += dissipator(channel, particle_index, rho, model)?;
    }
    Ok(out)
}

/// Two-qubit fridge cooling a third qubit. Particles: object (E1, bath Tc),
/// sink (E2, bath Tr), engine (E2 - E1, bath Th).
pub fn build_model_i(p: &ModelIParams) -> Result<FridgeModel> {
    positive("E1", p.e1)?;
    if !(p.e2 > p.e1) {
        return Err(FridgeError::InvalidParameter {
            name: "E2".into(),
            reason: format!("must exceed E1 = {} so that E3 = E2 - E1 > 0", p.e1),
        });
    }
    non_negative("g", p.g)?;
    let e3 = p.e2 - p.e1;
    let particles = vec![
        ParticleSpec::new(vec![0.0, p.e1], vec![BathChannel::full_reset(p.tc, p.p1)?])?,
        ParticleSpec::new(vec![0.0, p.e2], vec![BathChannel::full_reset(p.tr, p.p2)?])?,
        ParticleSpec::new(vec![0.0, e3], vec![BathChannel::full_reset(p.th, p.p3)?])?,
    ];
    let interactions = vec![InteractionTerm::new(p.g, vec![0, 1, 0], vec![1, 0, 1])?];
    FridgeModel::new(particles, interactions, ModelTag::I)
}

/// Qubit-qutrit fridge with nearest-neighbour couplings `g` (1-2) and `h`
/// (2-3). Qutrit levels are `0, E2, E1 + E2`; the engine qubit has gap E2.
pub fn build_model_ii(p: &ModelIIParams) -> Result<FridgeModel> {
    positive("E1", p.e1)?;
    positive("E2", p.e2)?;
    non_negative("g", p.g)?;
    non_negative("h", p.h)?;
    let particles = vec![
        ParticleSpec::new(vec![0.0, p.e1], vec![BathChannel::full_reset(p.tc, p.p1)?])?,
        ParticleSpec::new(
            vec![0.0, p.e2, p.e1 + p.e2],
            vec![BathChannel::full_reset(p.tc, p.p2)?],
        )?,
        ParticleSpec::new(vec![0.0, p.e2], vec![BathChannel::full_reset(p.th, p.p3)?])?,
    ];
    let mut interactions = Vec::with_capacity(4);
    for spectator in 0..2 {
        interactions.push(InteractionTerm::new(
            p.g,
            vec![0, 2, spectator],
            vec![1, 1, spectator],
        )?);
    }
    for spectator in 0..2 {
        interactions.push(InteractionTerm::new(
            p.h,
            vec![spectator, 0, 1],
            vec![spectator, 1, 0],
        )?);
    }
    FridgeModel::new(particles, interactions, ModelTag::II)
}

/// Single-qutrit fridge. The qutrit's `0-1` transition touches the hot bath
/// and its `0-2` transition the room bath.
pub fn build_model_iii(p: &ModelIIIParams) -> Result<FridgeModel> {
    positive("E1", p.e1)?;
    positive("E2", p.e2)?;
    non_negative("g", p.g)?;
    let particles = vec![
        ParticleSpec::new(vec![0.0, p.e1], vec![BathChannel::full_reset(p.tc, p.p1)?])?,
        ParticleSpec::new(
            vec![0.0, p.e2, p.e1 + p.e2],
            vec![
                BathChannel::transition_jump(0, 1, p.th, p.ph)?,
                BathChannel::transition_jump(0, 2, p.tr, p.pr)?,
            ],
        )?,
    ];
    let interactions = vec![InteractionTerm::new(p.g, vec![0, 2], vec![1, 1])?];
    FridgeModel::new(particles, interactions, ModelTag::III)
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(FridgeError::InvalidParameter {
            name: name.into(),
            reason: format!("must be positive, got {value}"),
        })
    }
}

fn non_negative(name: &str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(FridgeError::InvalidParameter {
            name: name.into(),
            reason: format!("must be non-negative, got {value}"),
        })
    }
}
