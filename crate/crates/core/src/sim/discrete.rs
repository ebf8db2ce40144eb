//! Zero-order-hold discretization of a linear system with a step-averaged
//! scalar output.

use nalgebra::DMatrix;

/// `x_{n+1} = phi x_n + gamma u_n` and the output averaged over the step,
/// `y_n = out_x . x_n + out_u . u_n`, for inputs held constant over a step.
#[derive(Debug, Clone)]
pub(crate) struct Discrete {
    pub nx: usize,
    pub nu: usize,
    /// row-major `nx x nx`
    pub phi: Vec<f64>,
    /// row-major `nx x nu`
    pub gamma: Vec<f64>,
    pub out_x: Vec<f64>,
    pub out_u: Vec<f64>,
}

impl Discrete {
    /// `a` is `nx x nx`, `b` is `nx x nu`, output `y = c x + d u`.
    pub fn new(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &[f64], d: &[f64], dt: f64) -> Self {
        let nx = a.nrows();
        let nu = b.ncols();
        let size = 2 * nx + nu;
        // d/dt (x, u, int x) = [[A, B, 0], [0, 0, 0], [I, 0, 0]] (x, u, int x)
        let mut m = DMatrix::<f64>::zeros(size, size);
        m.view_mut((0, 0), (nx, nx)).copy_from(a);
        m.view_mut((0, nx), (nx, nu)).copy_from(b);
        for i in 0..nx {
            m[(nx + nu + i, i)] = 1.0;
        }
        let e = (m * dt).exp();
        let block = |r0: usize, c0: usize, rows: usize, cols: usize| {
            let mut v = Vec::with_capacity(rows * cols);
            for i in 0..rows {
                for j in 0..cols {
                    v.push(e[(r0 + i, c0 + j)]);
                }
            }
            v
        };
        let phi = block(0, 0, nx, nx);
        let gamma = block(0, nx, nx, nu);
        let psi = block(nx + nu, 0, nx, nx);
        let lambda = block(nx + nu, nx, nx, nu);
        let out_x = (0..nx)
            .map(|j| (0..nx).map(|i| c[i] * psi[i * nx + j]).sum::<f64>() / dt)
            .collect();
        let out_u = (0..nu)
            .map(|j| (0..nx).map(|i| c[i] * lambda[i * nu + j]).sum::<f64>() / dt + d[j])
            .collect();
        Discrete {
            nx,
            nu,
            phi,
            gamma,
            out_x,
            out_u,
        }
    }

    /// Advances `x` in place and returns the step-averaged output.
    pub fn step(&self, x: &mut [f64], u: &[f64], scratch: &mut [f64]) -> f64 {
        let mut y = 0.0;
        for i in 0..self.nx {
            y += self.out_x[i] * x[i];
        }
        for j in 0..self.nu {
            y += self.out_u[j] * u[j];
        }
        for i in 0..self.nx {
            let mut acc = 0.0;
            for j in 0..self.nx {
                acc += self.phi[i * self.nx + j] * x[j];
            }
            for j in 0..self.nu {
                acc += self.gamma[i * self.nu + j] * u[j];
            }
            scratch[i] = acc;
        }
        x.copy_from_slice(&scratch[..self.nx]);
        y
    }
}
