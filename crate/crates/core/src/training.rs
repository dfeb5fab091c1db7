//! Beam training between two quadruple-UPA terminals, Alice (transmitter
//! of the forward link) and Bob.
//!
//! * Exhaustive search tries all `16N⁴` narrow-beam pairs.
//! * Hierarchical training first picks the UPA pair from stage-0
//!   measurements (2 slots), then lets each side descend its codebook one
//!   binary split per slot pair while the other side holds a fixed beam
//!   (`4S` slots), for `4S + 2` slots in total.
//!
//! Power comparisons break ties toward the lower index. Two values count as
//! tied when they agree to a relative `1e-9`, so that exactly symmetric
//! situations resolve deterministically despite rounding.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::channel::{noisy_power, LinkEndpoints, LosLink, MeasurementConfig};
use crate::codebook::{build_codebook, CodebookConfig, CodebookKind, Codeword, HierarchicalCodebook, NarrowCodebook};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, CVector, Upa};

const TIE_TOLERANCE: f64 = 1e-9;

/// `candidate` beats the incumbent only when larger by more than the tie
/// tolerance.
fn beats(candidate: f64, incumbent: f64) -> bool {
    candidate > incumbent + TIE_TOLERANCE * incumbent.abs().max(f64::MIN_POSITIVE)
}

/// Position of the maximum, earliest on ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if beats(v, values[best]) {
            best = i;
        }
    }
    best
}

/// Hierarchical codebooks of the four UPAs; both terminals use the same set.
#[derive(Debug, Clone)]
pub struct QuadCodebook {
    books: Vec<HierarchicalCodebook>,
}

impl QuadCodebook {
    pub fn build(kind: CodebookKind, cfg: &CodebookConfig) -> Result<Self> {
        if !kind.is_hierarchical() {
            return Err(Error::config(format!(
                "codebook kind '{kind}' has no wide beams and cannot drive hierarchical training"
            )));
        }
        let books = Upa::ALL
            .iter()
            .map(|&k| build_codebook(kind, cfg, k).map(|b| b.hierarchical().cloned().expect("hierarchical kind")))
            .collect::<Result<_>>()?;
        Ok(QuadCodebook { books })
    }

    pub fn from_books(books: [HierarchicalCodebook; 4]) -> Result<Self> {
        for (k, b) in Upa::ALL.iter().zip(&books) {
            if b.upa != *k {
                return Err(Error::arg(format!("codebook for UPA {} supplied in slot {}", b.upa, k)));
            }
        }
        Ok(QuadCodebook { books: books.into() })
    }

    pub fn upa(&self, k: Upa) -> &HierarchicalCodebook {
        &self.books[k.offset()]
    }

    pub fn narrow_books(&self) -> [&NarrowCodebook; 4] {
        [0, 1, 2, 3].map(|i| self.books[i].narrow())
    }

    pub fn geometry(&self) -> ArrayGeometry {
        self.books[0].config.geometry
    }

    pub fn stage_count(&self) -> usize {
        self.books[0].stage_count()
    }
}

/// Measurement conditions of one training run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrainingSetup {
    pub measurement: MeasurementConfig,
    /// Divide the transmit power among the four UPAs in the first Phase-1
    /// slot instead of giving each its own full `P`.
    pub split_phase1_power: bool,
}

impl TrainingSetup {
    pub fn new(measurement: MeasurementConfig) -> Self {
        TrainingSetup {
            measurement,
            split_phase1_power: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrainingOutcome {
    pub tx_upa: Upa,
    pub rx_upa: Upa,
    /// One-based narrow-beam indices at Alice and Bob.
    pub tx_beam: usize,
    pub rx_beam: usize,
    pub measurement_slots: u64,
    /// Noiseless `|w^H H f|²` of the selected pair.
    pub achieved_gain: f64,
    /// `achieved_gain` over the unconstrained optimum `max σ₁(H)²`.
    pub normalized_gain: f64,
    pub success: bool,
}

impl TrainingOutcome {
    pub fn same_pair(&self, other: &TrainingOutcome) -> bool {
        (self.tx_upa, self.rx_upa, self.tx_beam, self.rx_beam)
            == (other.tx_upa, other.rx_upa, other.tx_beam, other.rx_beam)
    }
}

/// Channel factors of all sixteen UPA pairs for one link.
struct LinkState {
    pairs: Vec<LinkEndpoints>,
}

impl LinkState {
    fn new(link: &LosLink, geom: &ArrayGeometry) -> Self {
        let pairs = Upa::ALL
            .iter()
            .flat_map(|&k| Upa::ALL.iter().map(move |&m| link.endpoints(geom, k, m)))
            .collect();
        LinkState { pairs }
    }

    fn pair(&self, k: Upa, m: Upa) -> &LinkEndpoints {
        &self.pairs[k.offset() * 4 + m.offset()]
    }
}

/// Noiseless search over every narrow-beam pair of every UPA pair,
/// keeping the lexicographically first `(k, i, m, j)` among ties.
pub fn exhaustive_search(link: &LosLink, narrow: [&NarrowCodebook; 4]) -> TrainingOutcome {
    let geom = narrow[0].geometry;
    let state = LinkState::new(link, &geom);
    exhaustive_with_state(link, &state, narrow)
}

fn exhaustive_with_state(link: &LosLink, state: &LinkState, narrow: [&NarrowCodebook; 4]) -> TrainingOutcome {
    // Rank-one channel: the pair gain factors into per-side beam gains.
    let tx: Vec<Vec<f64>> = Upa::ALL
        .iter()
        .map(|&k| {
            let a = &state.pair(k, k).departure;
            narrow[k.offset()]
                .beams
                .iter()
                .map(|c| a.dotc(&c.weights).norm_sqr())
                .collect()
        })
        .collect();
    let rx: Vec<Vec<f64>> = Upa::ALL
        .iter()
        .map(|&m| {
            let a = &state.pair(m, m).arrival;
            narrow[m.offset()]
                .beams
                .iter()
                .map(|c| c.weights.dotc(a).norm_sqr())
                .collect()
        })
        .collect();

    let mut best = (Upa::ALL[0], 0, Upa::ALL[0], 0);
    let mut best_gain = f64::NEG_INFINITY;
    let mut pairs = 0u64;
    for &k in &Upa::ALL {
        for (i, &gt) in tx[k.offset()].iter().enumerate() {
            for &m in &Upa::ALL {
                let c = state.pair(k, m).coefficient.norm_sqr();
                for (j, &gr) in rx[m.offset()].iter().enumerate() {
                    pairs += 1;
                    let g = c * gt * gr;
                    if best_gain == f64::NEG_INFINITY || beats(g, best_gain) {
                        best_gain = g;
                        best = (k, i, m, j);
                    }
                }
            }
        }
    }
    let (k, i, m, j) = best;
    let achieved = state
        .pair(k, m)
        .response(
            &narrow[k.offset()].beams[i].weights,
            &narrow[m.offset()].beams[j].weights,
        )
        .norm_sqr();
    TrainingOutcome {
        tx_upa: k,
        rx_upa: m,
        tx_beam: i + 1,
        rx_beam: j + 1,
        measurement_slots: pairs,
        achieved_gain: achieved,
        normalized_gain: normalized(achieved, link),
        success: true,
    }
}

fn normalized(gain: f64, link: &LosLink) -> f64 {
    let opt = link.optimal_gain();
    if opt > 0.0 {
        gain / opt
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Phase1Outcome {
    pub tx_upa: Upa,
    pub rx_upa: Upa,
    pub slots: u64,
}

/// Select the UPA pair from two slots of stage-0 measurements.
pub fn phase1<R: Rng + ?Sized>(
    link: &LosLink,
    books: &QuadCodebook,
    setup: &TrainingSetup,
    rng: &mut R,
) -> Phase1Outcome {
    let state = LinkState::new(link, &books.geometry());
    phase1_with_state(&state, books, setup, rng)
}

fn root(books: &QuadCodebook, k: Upa) -> &CVector {
    &books.upa(k).stage(0)[0].weights
}

fn phase1_with_state<R: Rng + ?Sized>(
    state: &LinkState,
    books: &QuadCodebook,
    setup: &TrainingSetup,
    rng: &mut R,
) -> Phase1Outcome {
    let p = setup.measurement.transmit_power;
    let sigma2 = setup.measurement.noise_power;
    let per_upa = if setup.split_phase1_power { p / 4.0 } else { p };

    // Slot 1: all of Alice's UPAs transmit at once, each of Bob's listens.
    let bob: Vec<f64> = Upa::ALL
        .iter()
        .map(|&m| {
            let w = root(books, m);
            let signal: Complex64 = Upa::ALL
                .iter()
                .map(|&k| state.pair(k, m).response(root(books, k), w) * per_upa.sqrt())
                .sum();
            noisy_power(sigma2, signal, w, rng)
        })
        .collect();
    let rx_upa = Upa::ALL[argmax(&bob)];

    // Slot 2: Bob answers on the chosen UPA, Alice listens on all four.
    let w = root(books, rx_upa);
    let alice: Vec<f64> = Upa::ALL
        .iter()
        .map(|&k| {
            let f = root(books, k);
            let signal = state.pair(k, rx_upa).response(f, w).conj() * p.sqrt();
            noisy_power(sigma2, signal, f, rng)
        })
        .collect();
    Phase1Outcome {
        tx_upa: Upa::ALL[argmax(&alice)],
        rx_upa,
        slots: 2,
    }
}

/// Walk a codebook from its root to a narrow beam, measuring the two
/// children of the current beam at each stage and keeping the stronger.
/// Returns the selected one-based index at every stage `0..=S`.
pub fn descend<F>(book: &HierarchicalCodebook, mut measure: F) -> Vec<usize>
where
    F: FnMut(&Codeword) -> f64,
{
    let mut path = vec![1];
    let mut current = 1;
    for s in 0..book.stage_count() {
        let [a, b] = book.children(s, current);
        let stage = book.stage(s + 1);
        let ga = measure(&stage[a - 1]);
        let gb = measure(&stage[b - 1]);
        current = if beats(gb, ga) { b } else { a };
        path.push(current);
    }
    path
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Phase2Outcome {
    pub tx_beam: usize,
    pub rx_beam: usize,
    pub slots: u64,
}

/// Narrow-beam search on a fixed UPA pair.
pub fn phase2<R: Rng + ?Sized>(
    link: &LosLink,
    books: &QuadCodebook,
    tx_upa: Upa,
    rx_upa: Upa,
    setup: &TrainingSetup,
    rng: &mut R,
) -> Phase2Outcome {
    let state = LinkState::new(link, &books.geometry());
    phase2_with_state(&state, books, tx_upa, rx_upa, setup, rng)
}

fn phase2_with_state<R: Rng + ?Sized>(
    state: &LinkState,
    books: &QuadCodebook,
    tx_upa: Upa,
    rx_upa: Upa,
    setup: &TrainingSetup,
    rng: &mut R,
) -> Phase2Outcome {
    let amp = setup.measurement.transmit_power.sqrt();
    let sigma2 = setup.measurement.noise_power;
    let pair = state.pair(tx_upa, rx_upa);
    let alice = books.upa(tx_upa);
    let bob = books.upa(rx_upa);
    let mut slots = 0u64;

    // Step 1: Bob holds his root beam, Alice descends.
    let w = &bob.stage(0)[0].weights;
    let tx_path = descend(alice, |c| {
        slots += 1;
        noisy_power(sigma2, pair.response(&c.weights, w).conj() * amp, &c.weights, rng)
    });
    let tx_beam = *tx_path.last().expect("non-empty path");

    // Step 2: Alice holds her narrow beam, Bob descends.
    let f = &alice.narrow().beams[tx_beam - 1].weights;
    let rx_path = descend(bob, |c| {
        slots += 1;
        noisy_power(sigma2, pair.response(f, &c.weights) * amp, &c.weights, rng)
    });
    Phase2Outcome {
        tx_beam,
        rx_beam: *rx_path.last().expect("non-empty path"),
        slots,
    }
}

/// Run both phases and score the result against noiseless exhaustive
/// search on the same link.
pub fn hierarchical_training<R: Rng + ?Sized>(
    link: &LosLink,
    books: &QuadCodebook,
    setup: &TrainingSetup,
    rng: &mut R,
) -> TrainingOutcome {
    let state = LinkState::new(link, &books.geometry());
    let reference = exhaustive_with_state(link, &state, books.narrow_books());
    train_against(link, &state, books, setup, &reference, rng)
}

/// Hierarchical training scored against a precomputed exhaustive result.
pub fn hierarchical_training_against<R: Rng + ?Sized>(
    link: &LosLink,
    books: &QuadCodebook,
    setup: &TrainingSetup,
    reference: &TrainingOutcome,
    rng: &mut R,
) -> TrainingOutcome {
    let state = LinkState::new(link, &books.geometry());
    train_against(link, &state, books, setup, reference, rng)
}

fn train_against<R: Rng + ?Sized>(
    link: &LosLink,
    state: &LinkState,
    books: &QuadCodebook,
    setup: &TrainingSetup,
    reference: &TrainingOutcome,
    rng: &mut R,
) -> TrainingOutcome {
    let p1 = phase1_with_state(state, books, setup, rng);
    let p2 = phase2_with_state(state, books, p1.tx_upa, p1.rx_upa, setup, rng);
    let f = &books.upa(p1.tx_upa).narrow().beams[p2.tx_beam - 1].weights;
    let w = &books.upa(p1.rx_upa).narrow().beams[p2.rx_beam - 1].weights;
    let achieved = state.pair(p1.tx_upa, p1.rx_upa).response(f, w).norm_sqr();
    let mut outcome = TrainingOutcome {
        tx_upa: p1.tx_upa,
        rx_upa: p1.rx_upa,
        tx_beam: p2.tx_beam,
        rx_beam: p2.rx_beam,
        measurement_slots: p1.slots + p2.slots,
        achieved_gain: achieved,
        normalized_gain: normalized(achieved, link),
        success: false,
    };
    outcome.success = outcome.same_pair(reference);
    outcome
}

/// Slot count of hierarchical training, `4S + 2`.
pub fn hierarchical_slot_count(stages: usize) -> u64 {
    4 * stages as u64 + 2
}

/// Pair count of exhaustive training, `16N⁴`.
pub fn exhaustive_pair_count(per_axis: usize) -> u64 {
    16 * (per_axis as u64).pow(4)
}
