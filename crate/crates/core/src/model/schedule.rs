//! Nine-segment square-pulse CNOT protocol (control qubit 1, target qubit 2).

use std::f64::consts::PI;

use super::params::ControlParams;
use crate::qop::{Axis, OperatorMatrix, PauliSum, QubitLayout};
use crate::Result;

/// `coeff · Π σ_axis^qubit` on the two system qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlTerm {
    pub factors: Vec<(Axis, usize)>,
    pub coeff: f64,
}

impl ControlTerm {
    fn single(axis: Axis, qubit: usize, coeff: f64) -> Self {
        Self {
            factors: vec![(axis, qubit)],
            coeff,
        }
    }
}

/// One constant-Hamiltonian interval `[t_start, t_end]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    /// Duration from its closed-form expression.
    pub duration: f64,
    pub terms: Vec<ControlTerm>,
}

impl Segment {
    /// The segment Hamiltonian as a Pauli sum on `layout`, whose qubits 1
    /// and 2 are the system register.
    pub fn pauli_sum(&self, layout: &QubitLayout) -> Result<PauliSum> {
        let mut s = PauliSum::new(layout);
        for t in &self.terms {
            s.add_string(&t.factors, t.coeff, layout)?;
        }
        Ok(s)
    }

    /// Dense 4×4 Hamiltonian on the system register.
    pub fn hamiltonian(&self) -> OperatorMatrix {
        let l = QubitLayout::register(2).expect("two qubits");
        self.pauli_sum(&l).expect("system qubits are 1 and 2").to_dense()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulseSchedule {
    segments: Vec<Segment>,
    switch_times: Vec<f64>,
}

impl PulseSchedule {
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `τ_0 = 0, τ_1, …, τ_9`.
    pub fn switch_times(&self) -> &[f64] {
        &self.switch_times
    }

    /// Total gate time `τ_9`.
    pub fn total_time(&self) -> f64 {
        *self.switch_times.last().expect("non-empty schedule")
    }

    /// Index of the segment that is active on `(t_start, t_end]` containing `t`.
    pub fn segment_at(&self, t: f64) -> usize {
        self.segments
            .iter()
            .position(|s| t <= s.t_end)
            .unwrap_or(self.segments.len() - 1)
    }

    /// A single-segment schedule; used for analytic checks.
    pub fn single(duration: f64, terms: Vec<ControlTerm>) -> Self {
        Self {
            segments: vec![Segment {
                t_start: 0.0,
                t_end: duration,
                duration,
                terms,
            }],
            switch_times: vec![0.0, duration],
        }
    }
}

/// Which closed-form duration a segment uses.
#[derive(Clone, Copy)]
enum Interval {
    QuarterZ,
    QuarterX,
    DiagonalZ,
    Coupling,
}

/// Builds the CNOT protocol for control amplitudes `cp`.
///
/// | segment | duration       | Hamiltonian                                  |
/// |---------|----------------|----------------------------------------------|
/// | 1       | π/(2Bz)        | −½Bz σz²                                     |
/// | 2       | π/(2Bx)        | −½Bx σx²                                     |
/// | 3       | π/(2Bz)        | +½Bz σz²                                     |
/// | 4       | √2π/(2Bz)      | −½Bz Σᵢ(σzⁱ + σxⁱ)                           |
/// | 5       | π/(4Jx)        | Jx(−σx¹ − σx² + σx¹σx²)                      |
/// | 6       | √2π/(2Bz)      | +½Bz Σᵢ(σzⁱ + σxⁱ)                           |
/// | 7       | π/(2Bz)        | −½Bz σz²                                     |
/// | 8       | π/(2Bx)        | +½Bx σx²                                     |
/// | 9       | π/(2Bz)        | +½Bz σz²                                     |
pub fn build_pulse_schedule(cp: &ControlParams) -> Result<PulseSchedule> {
    cp.validate()?;
    let (bx, bz, jx) = (cp.b_x, cp.b_z, cp.j_x);
    let both = |sign: f64| -> Vec<ControlTerm> {
        [1, 2]
            .iter()
            .flat_map(|&q| {
                [
                    ControlTerm::single(Axis::Z, q, sign * 0.5 * bz),
                    ControlTerm::single(Axis::X, q, sign * 0.5 * bz),
                ]
            })
            .collect()
    };
    let plan: Vec<(Interval, Vec<ControlTerm>)> = vec![
        (Interval::QuarterZ, vec![ControlTerm::single(Axis::Z, 2, -0.5 * bz)]),
        (Interval::QuarterX, vec![ControlTerm::single(Axis::X, 2, -0.5 * bx)]),
        (Interval::QuarterZ, vec![ControlTerm::single(Axis::Z, 2, 0.5 * bz)]),
        (Interval::DiagonalZ, both(-1.0)),
        (
            Interval::Coupling,
            vec![
                ControlTerm::single(Axis::X, 1, -jx),
                ControlTerm::single(Axis::X, 2, -jx),
                ControlTerm {
                    factors: vec![(Axis::X, 1), (Axis::X, 2)],
                    coeff: jx,
                },
            ],
        ),
        (Interval::DiagonalZ, both(1.0)),
        (Interval::QuarterZ, vec![ControlTerm::single(Axis::Z, 2, -0.5 * bz)]),
        (Interval::QuarterX, vec![ControlTerm::single(Axis::X, 2, 0.5 * bx)]),
        (Interval::QuarterZ, vec![ControlTerm::single(Axis::Z, 2, 0.5 * bz)]),
    ];

    let unit = |iv: Interval| match iv {
        Interval::QuarterZ => PI / (2.0 * bz),
        Interval::QuarterX => PI / (2.0 * bx),
        Interval::DiagonalZ => 2f64.sqrt() * PI / (2.0 * bz),
        Interval::Coupling => PI / (4.0 * jx),
    };
    // τ_k from counts of each interval kind, not from a running sum.
    let mut counts = [0u32; 4];
    let mut switch_times = vec![0.0];
    let mut segments = Vec::with_capacity(plan.len());
    for (iv, terms) in plan {
        counts[iv as usize] += 1;
        let t_end = [
            Interval::QuarterZ,
            Interval::QuarterX,
            Interval::DiagonalZ,
            Interval::Coupling,
        ]
        .iter()
        .map(|&k| counts[k as usize] as f64 * unit(k))
        .sum::<f64>();
        let t_start = *switch_times.last().expect("τ_0 present");
        segments.push(Segment {
            t_start,
            t_end,
            duration: unit(iv),
            terms,
        });
        switch_times.push(t_end);
    }
    Ok(PulseSchedule {
        segments,
        switch_times,
    })
}
