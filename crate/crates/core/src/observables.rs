//! Temperatures, heat currents and the perfect-insulation limit.

use serde::{Deserialize, Serialize};

use crate::error::{FridgeError, Result};
use crate::models::{dissipator, FridgeModel, ParticleSpec};
use crate::tensor::{diag, reduced_state, trace, trace_distance, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureKind {
    Finite,
    /// Population inversion; the value is negative.
    Negative,
    /// Equal populations.
    Infinite,
    /// No excited population at all; the value is zero.
    Ground,
}

impl TemperatureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TemperatureKind::Finite => "finite",
            TemperatureKind::Negative => "negative",
            TemperatureKind::Infinite => "infinite",
            TemperatureKind::Ground => "ground",
        }
    }
}

/// Effective temperature read off a single-particle state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureReading {
    pub value: f64,
    /// Level spacing the reading is referenced to (the qubit gap, or the
    /// first spacing for a qutrit).
    pub gap_used: f64,
    /// Trace distance between the state and the Gibbs state at `value`.
    pub thermality_defect: f64,
    pub kind: TemperatureKind,
}

/// Inverse of the Gibbs map on the diagonal populations.
///
/// Qubits use `T = gap / ln(p0 / p1)`. Qutrits fit one inverse temperature to
/// both log-population ratios by least squares through the origin.
pub fn temperature_of(reduced: &ComplexMatrix, particle: &ParticleSpec) -> Result<TemperatureReading> {
    let d = particle.levels();
    if reduced.nrows() != d || reduced.ncols() != d {
        return Err(FridgeError::DimensionMismatch {
            expected: d,
            found: reduced.nrows(),
        });
    }
    let pops: Vec<f64> = reduced.diagonal().iter().map(|z| z.re).collect();
    let energies = &particle.energies;
    let gap_used = energies[1] - energies[0];

    let beta = if pops[0] <= 0.0 {
        // Fully inverted ground level.
        f64::NEG_INFINITY
    } else {
        let (mut num, mut den) = (0.0, 0.0);
        for n in 1..d {
            if pops[n] > 0.0 {
                let de = energies[n] - energies[0];
                num += de * (pops[0] / pops[n]).ln();
                den += de * de;
            }
        }
        if den == 0.0 {
            f64::INFINITY
        } else {
            num / den
        }
    };

    let (value, kind) = if beta == f64::INFINITY {
        (0.0, TemperatureKind::Ground)
    } else if beta == 0.0 {
        (f64::INFINITY, TemperatureKind::Infinite)
    } else if beta < 0.0 {
        (1.0 / beta, TemperatureKind::Negative)
    } else {
        (1.0 / beta, TemperatureKind::Finite)
    };

    let fitted = diag(&boltzmann_weights(energies, beta));
    let offdiag = reduced
        .iter()
        .enumerate()
        .any(|(k, z)| k % (d + 1) != 0 && z.norm() != 0.0);
    let thermality_defect = if offdiag {
        trace_distance(reduced, &fitted)
    } else {
        0.5 * pops
            .iter()
            .zip(fitted.diagonal().iter())
            .map(|(p, q)| (p - q.re).abs())
            .sum::<f64>()
    };

    Ok(TemperatureReading {
        value,
        gap_used,
        thermality_defect,
        kind,
    })
}

/// Normalised `exp(-beta E_n)`, valid for any sign of `beta` including the
/// infinite limits.
fn boltzmann_weights(energies: &[f64], beta: f64) -> Vec<f64> {
    let n = energies.len();
    if beta == f64::INFINITY {
        let mut w = vec![0.0; n];
        w[0] = 1.0;
        return w;
    }
    if beta == f64::NEG_INFINITY {
        let mut w = vec![0.0; n];
        w[n - 1] = 1.0;
        return w;
    }
    let exponents: Vec<f64> = energies.iter().map(|e| -beta * e).collect();
    let top = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = exponents.iter().map(|x| (x - top).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Temperature of every particle in a joint state.
pub fn temperatures(model: &FridgeModel, rho: &ComplexMatrix) -> Result<Vec<TemperatureReading>> {
    (0..model.shape().num_particles())
        .map(|i| temperature_of(&reduced_state(rho, i, model.shape())?, model.particle(i)?))
        .collect()
}

/// Heat flowing from each particle's baths into the particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatCurrentVector {
    pub per_particle: Vec<f64>,
    /// Same currents split by bath channel, in channel order.
    pub per_channel: Vec<Vec<f64>>,
}

impl HeatCurrentVector {
    pub fn total(&self) -> f64 {
        self.per_particle.iter().sum()
    }
}

/// `Q_i = Tr(H_i D_i(rho))` with `H_i` the local free Hamiltonian of particle
/// `i` and `D_i` its bath channels.
pub fn heat_currents(model: &FridgeModel, rho: &ComplexMatrix) -> Result<HeatCurrentVector> {
    let mut per_particle = Vec::new();
    let mut per_channel = Vec::new();
    for (i, particle) in model.particles().iter().enumerate() {
        let h = model.local_hamiltonian(i)?;
        let channels: Vec<f64> = particle
            .baths
            .iter()
            .map(|c| Ok(trace(&(&h * dissipator(c, i, rho, model)?)).re))
            .collect::<Result<_>>()?;
        per_particle.push(channels.iter().sum());
        per_channel.push(channels);
    }
    Ok(HeatCurrentVector {
        per_particle,
        per_channel,
    })
}

/// Stationary temperature of the cooled qubit in the two-qubit fridge when it
/// is perfectly insulated from its own bath:
/// `Tc / (1 + (E3/E1) (1 - Tc/Th))`.
pub fn perfect_insulation_limit(tc: f64, th: f64, e1: f64, e3: f64) -> Result<f64> {
    for (name, v) in [("Tc", tc), ("Th", th), ("E1", e1)] {
        if !(v > 0.0) {
            return Err(FridgeError::InvalidParameter {
                name: name.into(),
                reason: format!("must be positive, got {v}"),
            });
        }
    }
    if !(e3 >= 0.0) || !e3.is_finite() {
        return Err(FridgeError::InvalidParameter {
            name: "E3".into(),
            reason: format!("must be finite and non-negative, got {e3}"),
        });
    }
    let denominator = 1.0 + (e3 / e1) * (1.0 - tc / th);
    if denominator <= 0.0 {
        return Err(FridgeError::OutsideCoolingRegime(denominator));
    }
    Ok(tc / denominator)
}
