use wavemodels::linear::{airy_evolve, energy_fraction_outside, measured_ray_decay, AiryState, PhysicalParams};
use wavemodels::spectral::{Grid, SpectralField};

fn gaussian(grid: Grid, a: f64, w: f64) -> SpectralField {
    SpectralField::from_fn(grid, |x, y| a * (-(w * w) * (x * x + y * y)).exp())
}

#[test]
fn ray_exponents_insensitive_to_doubling_the_period() {
    let p = PhysicalParams::default();
    let c0 = p.c0();
    let times: Vec<f64> = (0..7).map(|i| 100.0 + 50.0 * i as f64).collect();
    let slopes = |length: f64, nodes: usize| {
        let s = AiryState::at_rest_potential(gaussian(Grid::new_1d(length, nodes).unwrap(), 0.01, 1.0));
        (measured_ray_decay(&s, &p, 0.5 * c0, &times).unwrap(), measured_ray_decay(&s, &p, c0, &times).unwrap())
    };
    let (a1, b1) = slopes(3000.0, 4096);
    let (a2, b2) = slopes(6000.0, 8192);
    assert!((a1 - a2).abs() < 1e-3, "interior {a1} vs {a2}");
    assert!((b1 - b2).abs() < 1e-3, "edge {b1} vs {b2}");
}

#[test]
fn two_dimensional_causality() {
    let p = PhysicalParams::default();
    let grid = Grid::new_2d(100.0, 256).unwrap();
    let s = AiryState::at_rest_potential(gaussian(grid, 0.01, 1.0));
    let mut worst = 0.0f64;
    for t in [2.0, 5.0, 10.0] {
        let e = airy_evolve(&s, &p, t).unwrap();
        worst = worst.max(energy_fraction_outside(&e.zeta, p.c0() * t + 15.0));
    }
    assert!(worst < 1e-6, "{worst:e}");
}
