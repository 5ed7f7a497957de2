//! Dormand–Prince 8(5,3) for `dψ/dt = −iHψ` with constant `H`.

use crate::qop::LinearOperator;
use crate::{Error, Result, C64};

const STAGES: usize = 12;
#[cfg(test)]
const C: [f64; 12] = [0.0, 0.05260015195876773, 0.0789002279381516, 0.1183503419072274, 0.2816496580927726, 0.3333333333333333, 0.25, 0.3076923076923077, 0.6512820512820513, 0.6, 0.8571428571428571, 1.0];
const A: [[f64; 12]; 12] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0],
    [0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0],
    [-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0],
    [2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0],
];
const B: [f64; 12] = [0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259];
const E3: [f64; 13] = [-0.18980075407240762, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, -0.4226823213237919, -0.1521609496625161, 0.20136540080403034, 0.02265179219836082, 0.0];
const E5: [f64; 13] = [0.01312004499419488, 0.0, 0.0, 0.0, 0.0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.3341791187130175, 0.08192320648511571, -0.022355307863886294, 0.0];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_STEPS: usize = 50_000_000;

pub(crate) struct Dop853<'a> {
    op: &'a dyn LinearOperator,
    rtol: f64,
    atol: f64,
    k: Vec<Vec<C64>>,
    stage: Vec<C64>,
    y_new: Vec<C64>,
}

impl<'a> Dop853<'a> {
    pub(crate) fn new(op: &'a dyn LinearOperator, rtol: f64, atol: f64) -> Self {
        let n = op.dim();
        Self {
            op,
            rtol,
            atol,
            k: vec![vec![C64::new(0.0, 0.0); n]; STAGES],
            stage: vec![C64::new(0.0, 0.0); n],
            y_new: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// `out = −i H y`.
    fn rhs(op: &dyn LinearOperator, y: &[C64], out: &mut [C64]) {
        op.apply_into(y, out);
        for z in out.iter_mut() {
            *z = C64::new(z.im, -z.re);
        }
    }

    /// One trial step of size `h` from `y` (with `k[0] = f(y)` already
    /// set). Leaves the candidate in `y_new` and returns the scaled error
    /// norm of the combined third- and fifth-order estimators.
    fn attempt(&mut self, y: &[C64], h: f64) -> f64 {
        let n = y.len();
        for s in 1..STAGES {
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..s {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += self.k[j][i] * a;
                    }
                }
                self.stage[i] = y[i] + acc * h;
            }
            Self::rhs(self.op, &self.stage, &mut self.k[s]);
        }
        let (mut e5, mut e3) = (0.0, 0.0);
        for i in 0..n {
            let (mut acc, mut d5, mut d3) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            for j in 0..STAGES {
                let k = self.k[j][i];
                if B[j] != 0.0 {
                    acc += k * B[j];
                }
                if E5[j] != 0.0 {
                    d5 += k * E5[j];
                }
                if E3[j] != 0.0 {
                    d3 += k * E3[j];
                }
            }
            self.y_new[i] = y[i] + acc * h;
            let scale = self.atol + self.rtol * y[i].norm().max(self.y_new[i].norm());
            e5 += d5.norm_sqr() / (scale * scale);
            e3 += d3.norm_sqr() / (scale * scale);
        }
        if e5 == 0.0 && e3 == 0.0 {
            return 0.0;
        }
        h.abs() * e5 / ((e5 + 0.01 * e3) * n as f64).sqrt()
    }

    /// Integrates from `t0` to `t1`, landing exactly on every time in
    /// `outputs` (all inside `(t0, t1]`) and calling `emit` there.
    pub(crate) fn integrate(
        &mut self,
        y: &mut [C64],
        t0: f64,
        t1: f64,
        outputs: &[(usize, f64)],
        emit: &mut dyn FnMut(usize, &[C64]),
    ) -> Result<()> {
        Self::rhs(self.op, y, &mut self.k[0]);
        let fnorm = self.k[0].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let ynorm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
        let mut h = (0.01 * ynorm / fnorm.max(1e-300)).min(t1 - t0);
        let mut t = t0;
        let mut next = 0;
        let mut steps = 0;
        while t < t1 {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Integration { t, reason: "step budget exhausted".into() });
            }
            let target = outputs.get(next).map_or(t1, |o| o.1);
            let (step, lands) = if t + h >= target { (target - t, true) } else { (h, false) };
            if step <= 1e-14 * t.abs().max(1.0) && !lands {
                return Err(Error::Integration { t, reason: format!("step size underflow (h = {step:e})") });
            }
            let err = self.attempt(y, step);
            if !err.is_finite() {
                return Err(Error::Integration { t, reason: "non-finite error estimate".into() });
            }
            let factor = if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(-1.0 / 8.0)).clamp(MIN_FACTOR, MAX_FACTOR) };
            if err <= 1.0 {
                y.copy_from_slice(&self.y_new);
                Self::rhs(self.op, y, &mut self.k[0]);
                t = if lands { target } else { t + step };
                while next < outputs.len() && outputs[next].1 <= t {
                    emit(outputs[next].0, y);
                    next += 1;
                }
                h = if lands && step < h { h.max(step * factor) } else { step * factor };
            } else {
                h = step * factor.min(1.0);
                if h <= 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Integration { t, reason: format!("step size underflow (h = {h:e})") });
                }
            }
        }
        Ok(())
    }
}
