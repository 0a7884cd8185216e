//! GHZ-state sharing with a threshold that can only go up.
//!
//! A [`SharingSession`] holds `a|0…0⟩ + b|1…1⟩` on one qubit per live
//! [`ShareHandle`]. Reconstruction needs every live handle. Any holder can
//! [`split`](SharingSession::split) their particle into `k` by entangling
//! fresh ancillas with CNOTs, which raises the threshold by `k - 1` and
//! consumes the old handle for good.
//!
//! Handles are not `Clone`, there is no way to export the state behind a
//! handle, and every handle is checked against the session registry before
//! use. That is the simulator's stand-in for the no-cloning theorem.
//!
//! Sessions with at most [`DENSE_PROTOCOL_LIMIT`] parties are also driven
//! through the dense statevector simulator; larger ones use the closed form
//! only.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;
use thiserror::Error;

use crate::quantum::{
    equator_basis, fidelity_with_ghz, fidelity_with_pure, measure, measure_mixed, partial_trace,
    DensityMatrix, GhzForm, MeasurementBasis, QuantumError, SecretQubit, StateVector,
    MAX_DENSE_REDUCED_QUBITS, NORM_TOLERANCE,
};

/// Largest session replayed and analyzed with dense statevectors.
pub const DENSE_PROTOCOL_LIMIT: usize = 12;

static NEXT_SESSION: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("a session needs at least one party, got {0}")]
    BadPartyCount(usize),
    #[error("a split must produce at least two shares, got {0}")]
    BadSplitArity(usize),
    #[error("handle {0} does not belong to this session")]
    UnknownHandle(u64),
    #[error("handle {0} has already been consumed")]
    ShareConsumed(u64),
    #[error("handle {0} supplied twice")]
    DuplicateHandle(u64),
    #[error("{present} of {required} shares present; every live share is required")]
    IncompleteQuorum { present: usize, required: usize },
    #[error("subset of {size} is not a proper nonempty subset of {live} live shares")]
    NotProperSubset { size: usize, live: usize },
    #[error("uncomputing the sharing circuit left residual weight {0}")]
    ReconstructionFailed(f64),
}

/// Capability to one particle of a session.
///
/// Deliberately neither `Clone` nor `Copy`:
///
/// ```compile_fail
/// use qtcss_core::protocol::deal_quantum;
/// use qtcss_core::quantum::SecretQubit;
///
/// let (_session, handles) = deal_quantum(SecretQubit::zero(), 2).unwrap();
/// let copy = handles[0].clone();
/// ```
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct ShareHandle {
    session: u64,
    id: u64,
}

impl ShareHandle {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn session_id(&self) -> u64 {
        self.session
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HandleStatus {
    Live,
    Consumed,
}

#[derive(Debug, Clone, Copy)]
struct HandleEntry {
    status: HandleStatus,
    wire: usize,
}

/// Session history, in order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum SessionEvent {
    Deal {
        parties: usize,
    },
    Split {
        handle: u64,
        arity: usize,
        threshold: usize,
    },
    Analyze {
        subset_size: usize,
        purity: f64,
        fidelity: f64,
    },
    Reconstruct {
        parties: usize,
    },
    Rejected {
        operation: String,
        reason: String,
    },
}

/// What a proper subset of the parties can see.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakageReport {
    pub subset_size: usize,
    pub reduced_state: DensityMatrix,
    pub purity: f64,
    /// Fidelity against the subset-sized GHZ state carrying the secret.
    pub fidelity: f64,
    pub is_mixed: bool,
}

#[derive(Debug)]
pub struct SharingSession {
    id: u64,
    state: GhzForm,
    handles: BTreeMap<u64, HandleEntry>,
    live: Vec<u64>,
    // CNOTs (control wire, target wire) applied since dealing, in order
    circuit: Vec<(usize, usize)>,
    next_handle: u64,
    closed: bool,
    // analysis is read-only but still logged
    transcript: RefCell<Vec<SessionEvent>>,
}

/// Shares `secret` among `parties` holders as `a|0…0⟩ + b|1…1⟩`.
pub fn deal_quantum(
    secret: SecretQubit,
    parties: usize,
) -> Result<(SharingSession, Vec<ShareHandle>), ProtocolError> {
    if parties == 0 {
        return Err(ProtocolError::BadPartyCount(parties));
    }
    let mut session = SharingSession {
        id: NEXT_SESSION.fetch_add(1, Ordering::Relaxed),
        state: GhzForm::from_secret(&secret, parties)?,
        handles: BTreeMap::new(),
        live: Vec::with_capacity(parties),
        circuit: (1..parties).map(|w| (0, w)).collect(),
        next_handle: 0,
        closed: false,
        transcript: RefCell::new(vec![SessionEvent::Deal { parties }]),
    };
    let handles = (0..parties).map(|w| session.issue(w)).collect();
    Ok((session, handles))
}

impl SharingSession {
    fn issue(&mut self, wire: usize) -> ShareHandle {
        let id = self.next_handle;
        self.next_handle += 1;
        self.handles.insert(
            id,
            HandleEntry {
                status: HandleStatus::Live,
                wire,
            },
        );
        self.live.push(id);
        ShareHandle {
            session: self.id,
            id,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    /// Current threshold: the number of live handles.
    pub fn threshold(&self) -> usize {
        self.live.len()
    }

    pub fn state(&self) -> &GhzForm {
        &self.state
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn transcript(&self) -> Vec<SessionEvent> {
        self.transcript.borrow().clone()
    }

    fn log(&self, event: SessionEvent) {
        self.transcript.borrow_mut().push(event);
    }

    pub fn status(&self, handle: &ShareHandle) -> Option<HandleStatus> {
        if handle.session != self.id {
            return None;
        }
        self.handles.get(&handle.id).map(|e| e.status)
    }

    /// CNOTs applied so far as `(control, target)` qubit pairs.
    pub fn circuit(&self) -> &[(usize, usize)] {
        &self.circuit
    }

    fn live_entry(&self, handle: &ShareHandle) -> Result<HandleEntry, ProtocolError> {
        if handle.session != self.id {
            return Err(ProtocolError::UnknownHandle(handle.id));
        }
        let entry = self
            .handles
            .get(&handle.id)
            .ok_or(ProtocolError::UnknownHandle(handle.id))?;
        if entry.status == HandleStatus::Consumed {
            return Err(ProtocolError::ShareConsumed(handle.id));
        }
        Ok(*entry)
    }

    fn live_wires(&self, handles: &[&ShareHandle]) -> Result<Vec<usize>, ProtocolError> {
        let mut seen = BTreeSet::new();
        handles
            .iter()
            .map(|h| {
                let entry = self.live_entry(h)?;
                if !seen.insert(h.id) {
                    return Err(ProtocolError::DuplicateHandle(h.id));
                }
                Ok(entry.wire)
            })
            .collect()
    }

    fn reject<T>(&self, operation: &str, err: ProtocolError) -> Result<T, ProtocolError> {
        self.log(SessionEvent::Rejected {
            operation: operation.to_string(),
            reason: err.to_string(),
        });
        Err(err)
    }

    /// Replaces `handle`'s particle with `arity` particles entangled with the
    /// rest. The old handle is consumed; the threshold grows by `arity - 1`.
    pub fn split(
        &mut self,
        handle: &ShareHandle,
        arity: usize,
    ) -> Result<Vec<ShareHandle>, ProtocolError> {
        let entry = match self.live_entry(handle) {
            Ok(e) => e,
            Err(e) => return self.reject("split", e),
        };
        if arity < 2 {
            return self.reject("split", ProtocolError::BadSplitArity(arity));
        }
        let new_state = self.state.resized(self.state.qubit_count() + arity - 1)?;

        self.handles
            .get_mut(&handle.id)
            .expect("checked live")
            .status = HandleStatus::Consumed;
        self.live.retain(|&id| id != handle.id);

        let first_new_wire = self.state.qubit_count();
        let mut issued = vec![self.issue(entry.wire)];
        for wire in first_new_wire..first_new_wire + arity - 1 {
            self.circuit.push((entry.wire, wire));
            issued.push(self.issue(wire));
        }
        self.state = new_state;
        debug_assert_eq!(self.live.len(), self.state.qubit_count());
        self.log(SessionEvent::Split {
            handle: handle.id,
            arity,
            threshold: self.threshold(),
        });
        Ok(issued)
    }

    /// Dense statevector obtained by running the dealing and every split as
    /// CNOTs on `secret ⊗ |0…0⟩`.
    pub fn replay_dense(&self) -> Result<StateVector, ProtocolError> {
        let mut state = StateVector::with_ancillas(&self.state.secret(), self.state.qubit_count())?;
        for &(control, target) in &self.circuit {
            state.apply_cnot(control, target)?;
        }
        Ok(state)
    }

    /// Recovers the secret. Requires exactly the full set of live handles and
    /// consumes all of them, closing the session.
    pub fn reconstruct(&mut self, handles: &[&ShareHandle]) -> Result<SecretQubit, ProtocolError> {
        if let Err(e) = self.live_wires(handles) {
            return self.reject("reconstruct", e);
        }
        if handles.len() != self.live.len() {
            let err = ProtocolError::IncompleteQuorum {
                present: handles.len(),
                required: self.live.len(),
            };
            return self.reject("reconstruct", err);
        }

        let n = self.state.qubit_count();
        let secret = if n <= DENSE_PROTOCOL_LIMIT {
            let mut state = self.replay_dense()?;
            for &(control, target) in self.circuit.iter().rev() {
                state.apply_cnot(control, target)?;
            }
            let amps = state.amplitudes();
            let (a, b) = (amps[0], amps[1 << (n - 1)]);
            let residual = 1.0 - (a.norm_sqr() + b.norm_sqr());
            if residual.abs() > NORM_TOLERANCE {
                return Err(ProtocolError::ReconstructionFailed(residual));
            }
            SecretQubit::new(a, b)?
        } else {
            self.state.secret()
        };

        for id in self.live.drain(..) {
            self.handles.get_mut(&id).expect("registered").status = HandleStatus::Consumed;
        }
        self.closed = true;
        self.log(SessionEvent::Reconstruct { parties: n });
        Ok(secret)
    }

    /// Reduced state held by a proper subset of the live handles.
    ///
    /// Read-only: the handles stay live. Real holders could not inspect their
    /// joint state without measuring it; this is an analysis hook.
    pub fn analyze_subset(&self, handles: &[&ShareHandle]) -> Result<LeakageReport, ProtocolError> {
        let wires = match self.live_wires(handles) {
            Ok(w) => w,
            Err(e) => return self.reject("analyze", e),
        };
        let k = wires.len();
        if k == 0 || k >= self.live.len() {
            let err = ProtocolError::NotProperSubset {
                size: k,
                live: self.live.len(),
            };
            return self.reject("analyze", err);
        }
        let subset_ghz = self.state.resized(k)?;
        let n = self.state.qubit_count();
        let (reduced_state, fidelity) =
            if n <= DENSE_PROTOCOL_LIMIT && k <= MAX_DENSE_REDUCED_QUBITS {
                let rho = partial_trace(&self.state.expand()?, &wires)?;
                let fidelity = fidelity_with_pure(&rho, &subset_ghz.expand()?)?;
                (rho, fidelity)
            } else {
                let rho = self.state.reduced(k)?;
                let fidelity = fidelity_with_ghz(&rho, &subset_ghz)?;
                (rho, fidelity)
            };
        let purity = reduced_state.purity();
        self.log(SessionEvent::Analyze {
            subset_size: k,
            purity,
            fidelity,
        });
        Ok(LeakageReport {
            subset_size: k,
            is_mixed: reduced_state.is_mixed(),
            reduced_state,
            purity,
            fidelity,
        })
    }
}

/// Encoding of a classical bit as one of two orthogonal qubit states:
/// bit 1 is the first basis vector, bit 0 the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalBitEncoding {
    basis: MeasurementBasis,
}

impl ClassicalBitEncoding {
    /// `(|0⟩ ± e^{iω}|1⟩)/√2`; hides the bit perfectly from proper subsets.
    pub fn equator(omega: f64) -> Self {
        Self {
            basis: equator_basis(omega),
        }
    }

    /// Any basis. Off the equator the two encodings carry different branch
    /// weights and proper subsets can tell them apart.
    pub fn from_basis(basis: MeasurementBasis) -> Self {
        Self { basis }
    }

    pub fn basis(&self) -> &MeasurementBasis {
        &self.basis
    }

    pub fn omega(&self) -> f64 {
        self.basis.omega()
    }

    pub fn bit_one_vector(&self) -> SecretQubit {
        self.basis.vectors()[0]
    }

    pub fn bit_zero_vector(&self) -> SecretQubit {
        self.basis.vectors()[1]
    }
}

pub fn encode_bit(bit: bool, encoding: &ClassicalBitEncoding) -> SecretQubit {
    if bit {
        encoding.bit_one_vector()
    } else {
        encoding.bit_zero_vector()
    }
}

/// Measures `q` in the encoding basis.
pub fn decode_bit<R: rand::Rng + ?Sized>(
    q: &SecretQubit,
    encoding: &ClassicalBitEncoding,
    rng: &mut R,
) -> bool {
    measure(q, &encoding.basis, rng) == 0
}

/// Measures a single leaked particle (a one-qubit reduced state) in the
/// encoding basis.
pub fn decode_leaked_bit<R: rand::Rng + ?Sized>(
    rho: &DensityMatrix,
    encoding: &ClassicalBitEncoding,
    rng: &mut R,
) -> Result<bool, ProtocolError> {
    Ok(measure_mixed(rho, &encoding.basis, rng)? == 0)
}

/// Largest entrywise difference between the states a subset sees for bit 0
/// and for bit 1. Zero means the subset learns nothing about the bit.
pub fn hiding_report(
    for_bit_zero: &DensityMatrix,
    for_bit_one: &DensityMatrix,
) -> Result<f64, ProtocolError> {
    Ok(for_bit_zero.max_abs_diff(for_bit_one)?)
}

/// Deals both encodings to `parties` holders and compares what the first
/// `subset_size` of them see.
pub fn subset_hiding(
    encoding: &ClassicalBitEncoding,
    parties: usize,
    subset_size: usize,
) -> Result<f64, ProtocolError> {
    let reduced = |bit| -> Result<DensityMatrix, ProtocolError> {
        let (session, handles) = deal_quantum(encode_bit(bit, encoding), parties)?;
        let subset: Vec<&ShareHandle> = handles.iter().take(subset_size).collect();
        Ok(session.analyze_subset(&subset)?.reduced_state)
    };
    hiding_report(&reduced(false)?, &reduced(true)?)
}
