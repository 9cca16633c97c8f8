//! Dormand–Prince 5(4) step with the standard 4th-order continuous extension.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

pub(crate) type State = [f64; 2];

/// Result of one trial step.
pub(crate) struct Step {
    pub y: State,
    pub err: State,
    pub k7: State,
    cont: [State; 5],
}

impl Step {
    /// Dense output at `theta ∈ [0, 1]` of the step.
    pub fn dense(&self, theta: f64) -> State {
        let t1 = 1.0 - theta;
        let c = &self.cont;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = c[0][i] + theta * (c[1][i] + t1 * (c[2][i] + theta * (c[3][i] + t1 * c[4][i])));
        }
        out
    }
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for i in 0..2 {
        out[i] += h * terms.iter().map(|(a, k)| a * k[i]).sum::<f64>();
    }
    out
}

/// One step from `(x, y)` with size `h`; `k1 = f(x, y)` is reused (FSAL).
pub(crate) fn step<F, E>(f: &F, x: f64, y: &State, k1: &State, h: f64) -> Result<Step, E>
where
    F: Fn(f64, &State) -> Result<State, E>,
{
    let k2 = f(x + C2 * h, &axpy(y, h, &[(A21, k1)]))?;
    let k3 = f(x + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = f(x + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = f(
        x + C5 * h,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    )?;
    let k6 = f(
        x + h,
        &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    )?;
    let y_new = axpy(
        y,
        h,
        &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
    );
    let k7 = f(x + h, &y_new)?;
    let mut err = [0.0; 2];
    let mut c5 = [0.0; 2];
    for i in 0..2 {
        err[i] = h
            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        c5[i] = h
            * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    let mut c1 = [0.0; 2];
    let mut c2 = [0.0; 2];
    let mut c3 = [0.0; 2];
    for i in 0..2 {
        c1[i] = y_new[i] - y[i];
        c2[i] = h * k1[i] - c1[i];
        c3[i] = c1[i] - h * k7[i] - c2[i];
    }
    Ok(Step {
        y: y_new,
        err,
        k7,
        cont: [*y, c1, c2, c3, c5],
    })
}
