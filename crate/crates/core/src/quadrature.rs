//! Quadrature rules used by the statistics and derivative modules.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes per Gauss–Legendre panel on the angular integrals.
pub const PANEL_ORDER: usize = 16;

const MAX_DEPTH: u32 = 40;
const PANEL_REL_TOL: f64 = 1e-14;
const PANEL_ABS_TOL: f64 = 1e-15;
const MAX_REFINE: usize = 256;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on Pₙ from the Tricomi initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// The shared 16-point panel rule.
    pub fn panel() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(PANEL_ORDER))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A quadrature value with the number of integrand evaluations spent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub evaluations: usize,
}

/// Periodic trapezoid over `[0, 2π)` with `n` equispaced nodes.
pub fn periodic_trapezoid(n: usize, mut f: impl FnMut(f64) -> f64) -> Integral {
    let h = 2.0 * PI / n as f64;
    let value = (0..n).map(|i| f(i as f64 * h)).sum::<f64>() * h;
    Integral {
        value,
        evaluations: n,
    }
}

/// Vector-valued panel integration over the breakpoints `breaks`
/// (sorted, first and last are the integration limits).
///
/// The range gets about `n_nodes / 16` initial 16-point panels, spread in
/// proportion to length with at least one per break interval. Each panel is
/// then bisected until halving changes no component by more than
/// `1e-14 · ∫|f|` over the panel, or by more than `1e-15 · ∫|f|` over the
/// whole range. The second floor stops refinement where the integrand is
/// only known to rounding, e.g. a chord seen almost edge-on. Refinement
/// also stops after `MAX_REFINE · n_nodes` evaluations.
pub fn integrate_panels<const N: usize>(
    breaks: &[f64],
    n_nodes: usize,
    mut f: impl FnMut(f64) -> [f64; N],
) -> ([f64; N], usize) {
    assert!(breaks.len() >= 2, "need at least one panel");
    let total = breaks[breaks.len() - 1] - breaks[0];
    let budget = (n_nodes / PANEL_ORDER).max(1) as f64;
    let rule = GaussLegendre::panel();
    let mut panels = Vec::new();
    let mut mass = [0.0; N];
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let pieces = ((budget * (b - a) / total).round() as usize).max(1);
        let h = (b - a) / pieces as f64;
        for j in 0..pieces {
            let lo = a + j as f64 * h;
            let hi = if j + 1 == pieces { b } else { lo + h };
            let (whole, mag) = panel(rule, lo, hi, &mut f);
            for (m, v) in mass.iter_mut().zip(mag) {
                *m += v;
            }
            panels.push((lo, hi, whole));
        }
    }
    let mut ctl = Refine {
        floor: mass.map(|m| PANEL_ABS_TOL * m),
        evals: panels.len() * PANEL_ORDER,
        cap: MAX_REFINE * n_nodes.max(PANEL_ORDER),
    };
    let mut acc = [0.0; N];
    for (lo, hi, whole) in panels {
        let part = adapt(rule, lo, hi, whole, 0, &mut f, &mut ctl);
        for (s, p) in acc.iter_mut().zip(part) {
            *s += p;
        }
    }
    (acc, ctl.evals)
}

/// Scalar convenience wrapper around [`integrate_panels`].
pub fn integrate_panels_scalar(
    breaks: &[f64],
    n_nodes: usize,
    mut f: impl FnMut(f64) -> f64,
) -> Integral {
    let ([value], evaluations) = integrate_panels(breaks, n_nodes, |x| [f(x)]);
    Integral { value, evaluations }
}

/// Panel sum of `f` and of `|f|`.
fn panel<const N: usize>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    f: &mut impl FnMut(f64) -> [f64; N],
) -> ([f64; N], [f64; N]) {
    let mut acc = [0.0; N];
    let mut mag = [0.0; N];
    for (x, w) in rule.mapped(a, b) {
        for ((s, m), v) in acc.iter_mut().zip(mag.iter_mut()).zip(f(x)) {
            *s += w * v;
            *m += w * v.abs();
        }
    }
    (acc, mag)
}

struct Refine<const N: usize> {
    floor: [f64; N],
    evals: usize,
    cap: usize,
}

fn adapt<const N: usize>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: [f64; N],
    depth: u32,
    f: &mut impl FnMut(f64) -> [f64; N],
    ctl: &mut Refine<N>,
) -> [f64; N] {
    let mid = 0.5 * (a + b);
    let (left, left_mag) = panel(rule, a, mid, f);
    let (right, right_mag) = panel(rule, mid, b, f);
    ctl.evals += 2 * PANEL_ORDER;
    let mut halves = [0.0; N];
    let mut converged = true;
    for i in 0..N {
        halves[i] = left[i] + right[i];
        let allowed = (PANEL_REL_TOL * (left_mag[i] + right_mag[i])).max(ctl.floor[i]);
        if (halves[i] - whole[i]).abs() > allowed {
            converged = false;
        }
    }
    if converged || depth >= MAX_DEPTH || ctl.evals >= ctl.cap || mid <= a || mid >= b {
        return halves;
    }
    let l = adapt(rule, a, mid, left, depth + 1, f, ctl);
    let r = adapt(rule, mid, b, right, depth + 1, f, ctl);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = l[i] + r[i];
    }
    out
}

/// Product rule on the sphere of directions with the pole along +x:
/// Gauss–Legendre in `t = cos φ` times the periodic trapezoid in `θ`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub polar: GaussLegendre,
    pub n_theta: usize,
}

impl SphereRule {
    pub fn new(n_phi: usize, n_theta: usize) -> Self {
        SphereRule {
            polar: GaussLegendre::new(n_phi),
            n_theta,
        }
    }

    pub fn evaluations(&self) -> usize {
        self.polar.len() * self.n_theta
    }
}
