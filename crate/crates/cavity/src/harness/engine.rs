//! Numerical propagation shared by the suite, the datasets and the CLI.

use crate::channels::{IdealDirect, OpenChannel};
use crate::error::Result;
use crate::linalg::{self, dagger, trace_product, Mat, C64};
use crate::model::{atom_state, partial_trace_atom_raw, CavityParams};

/// State of one flight of duration `dt` started from a cavity matrix.
#[derive(Debug, Clone)]
pub(crate) struct Flight {
    pub cavity: Mat,
    /// `⟨εb*b + E η + λ(b + b*)⊗η⟩` of the cavity plus the atom inside.
    pub energy: f64,
    /// Excited population of the atom inside.
    pub excited: f64,
}

pub(crate) enum Engine {
    Ideal { direct: IdealDirect, params: CavityParams },
    Open { channel: OpenChannel, params: CavityParams },
}

/// `Tr(x (b + b*))` without forming the operator.
fn quadrature(x: &Mat) -> f64 {
    (1..x.nrows()).map(|k| 2.0 * (k as f64).sqrt() * x[[k, k - 1]].re).sum()
}

fn photons(x: &Mat) -> f64 {
    (0..x.nrows()).map(|k| k as f64 * x[[k, k]].re).sum()
}

impl Engine {
    /// Joint-space unitary propagation for ideal parameters, the reduced open channel otherwise.
    pub fn new(params: &CavityParams, m: usize) -> Result<Self> {
        Ok(if params.is_ideal() {
            Engine::Ideal {
                direct: IdealDirect::new(params, m)?,
                params: *params,
            }
        } else {
            Engine::Open {
                channel: OpenChannel::new(params, m)?,
                params: *params,
            }
        })
    }

    pub fn params(&self) -> &CavityParams {
        match self {
            Engine::Ideal { params, .. } | Engine::Open { params, .. } => params,
        }
    }

    pub fn flight(&self, x: &Mat, dt: f64) -> Result<Flight> {
        match self {
            Engine::Ideal { direct, params } => {
                let u = direct.propagator(dt);
                let joint = u.dot(&linalg::kron(x, &atom_state(params.p))).dot(&dagger(&u));
                let excited = (0..joint.nrows() / 2).map(|k| joint[[2 * k, 2 * k]].re).sum();
                Ok(Flight {
                    energy: trace_product(&joint, direct.hamiltonian()).re,
                    cavity: partial_trace_atom_raw(&joint)?,
                    excited,
                })
            }
            Engine::Open { channel, params } => {
                let p = params.p;
                let (exc, gnd) = channel.branches(x, dt);
                let cavity = &exc * C64::new(p, 0.0) + &gnd * C64::new(1.0 - p, 0.0);
                let energy = params.eps * photons(&cavity)
                    + params.atom_energy * p
                    + params.lambda * p * quadrature(&exc);
                Ok(Flight { cavity, energy, excited: p })
            }
        }
    }

    pub fn step(&self, x: &Mat) -> Result<Flight> {
        self.flight(x, self.params().tau)
    }
}
