/// Degree-seven polynomial on [y0, y1] matching value and first three
/// derivatives at both ends.
#[derive(Clone, Copy, Debug)]
pub struct Hermite7 {
    y0: f64,
    h: f64,
    c: [f64; 8],
}

// inverse of the right-end conditions on the coefficients of s^4..s^7
const TAIL: [[f64; 4]; 4] = [
    [35.0, -15.0, 2.5, -1.0 / 6.0],
    [-84.0, 39.0, -7.0, 0.5],
    [70.0, -34.0, 6.5, -0.5],
    [-20.0, 10.0, -2.0, 1.0 / 6.0],
];

impl Hermite7 {
    /// `left` and `right` hold [f, f′, f″, f‴] at y0 and y1.
    pub fn new(y0: f64, y1: f64, left: [f64; 4], right: [f64; 4]) -> Self {
        let h = y1 - y0;
        let mut c = [0.0; 8];
        let mut hp = 1.0;
        let fact = [1.0, 1.0, 2.0, 6.0];
        let mut scaled = [0.0; 4];
        for j in 0..4 {
            c[j] = left[j] * hp / fact[j];
            scaled[j] = right[j] * hp;
            hp *= h;
        }
        // subtract the head's contribution to the j-th s-derivative at s = 1
        let mut r = [0.0; 4];
        for j in 0..4 {
            let mut head = 0.0;
            for k in j..4 {
                head += c[k] * falling(k, j);
            }
            r[j] = scaled[j] - head;
        }
        for (i, row) in TAIL.iter().enumerate() {
            c[4 + i] = row.iter().zip(&r).map(|(a, b)| a * b).sum();
        }
        Hermite7 { y0, h, c }
    }

    /// Value and y-derivative at y.
    pub fn eval_d(&self, y: f64) -> (f64, f64) {
        let s = (y - self.y0) / self.h;
        let mut p = self.c[7];
        let mut dp = 0.0;
        for k in (0..7).rev() {
            dp = dp * s + p;
            p = p * s + self.c[k];
        }
        (p, dp / self.h)
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.eval_d(y).0
    }
}

fn falling(k: usize, j: usize) -> f64 {
    (0..j).map(|i| (k - i) as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet(f: impl Fn(f64) -> [f64; 4], y: f64) -> [f64; 4] {
        f(y)
    }

    #[test]
    fn reproduces_degree_seven_polynomials() {
        let p = |y: f64| {
            let c = [0.3, -1.0, 0.5, 2.0, -0.7, 0.1, 0.05, -0.02];
            let mut d = [0.0; 4];
            for (k, ck) in c.iter().enumerate() {
                for j in 0..4 {
                    if k >= j {
                        d[j] += ck * falling(k, j) * y.powi((k - j) as i32);
                    }
                }
            }
            d
        };
        let h = Hermite7::new(-0.4, 1.3, jet(p, -0.4), jet(p, 1.3));
        for i in 0..=20 {
            let y = -0.4 + 1.7 * i as f64 / 20.0;
            let (v, dv) = h.eval_d(y);
            assert!((v - p(y)[0]).abs() < 1e-12, "{y}");
            assert!((dv - p(y)[1]).abs() < 1e-11, "{y}");
        }
    }

    #[test]
    fn eighth_order_on_sine() {
        let f = |y: f64| [y.sin(), y.cos(), -y.sin(), -y.cos()];
        let err = |h: f64| {
            let c = Hermite7::new(1.0, 1.0 + h, f(1.0), f(1.0 + h));
            (0..=10)
                .map(|i| {
                    let y = 1.0 + h * i as f64 / 10.0;
                    (c.eval(y) - y.sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(0.8), err(0.4));
        assert!(e1 < 1e-7 && e2 < e1 / 100.0, "{e1} {e2}");
    }
}
