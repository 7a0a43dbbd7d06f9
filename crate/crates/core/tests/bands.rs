use wboot::bands::{estimate_band_radius, kde_confidence_band};
use wboot::empirical::Sample;
use wboot::gaussian::kolmogorov_quantile;
use wboot::kde::{padded_grid, BandwidthRule, KernelSpec};
use wboot::law::ContinuousLaw;
use wboot::parallel::Workers;
use wboot::rng::SeedPath;
use wboot::weights::WeightScheme;

#[test]
fn radius_tracks_the_kolmogorov_quantile() {
    let n = 4000;
    let alpha = 0.1;
    let workers = Workers::from_env().unwrap();
    let root = SeedPath::new(2024);
    let radii: Vec<f64> = (0..50)
        .map(|r| {
            let rep = root.child(r);
            let sample =
                Sample::new(ContinuousLaw::standard_uniform().sample_n(n, &mut rep.child(0).stream())).unwrap();
            estimate_band_radius(&sample, &WeightScheme::ExpBayesian, 999, alpha, &rep.child(1), &workers)
                .unwrap()
                .radius
        })
        .collect();
    let mean = radii.iter().sum::<f64>() / radii.len() as f64;
    let q = kolmogorov_quantile(1.0 - alpha).unwrap();
    assert!((mean - q).abs() <= 0.08, "mean radius {mean} vs {q}");
}

#[test]
fn kde_band_radius_is_a_local_sup() {
    let n = 10_000;
    let sample = Sample::new(ContinuousLaw::standard_uniform().sample_n(n, &mut SeedPath::new(3).stream())).unwrap();
    let kernel = KernelSpec::epanechnikov();
    let rule = BandwidthRule::default();
    let h = rule.bandwidth(n).unwrap();
    let grid = padded_grid(&sample, &kernel, h, 512);
    let band = kde_confidence_band(
        &sample,
        &kernel,
        &rule,
        &WeightScheme::ExpBayesian,
        999,
        0.05,
        &grid,
        &SeedPath::new(4),
        &Workers::from_env().unwrap(),
    )
    .unwrap();
    assert_eq!(band.radius, band.psi[949]);
    // sup|gamma*| over windows of width 2h: well below sup|B|
    assert!(band.radius < 1.0, "{}", band.radius);
    assert!(band.radius > 0.4, "{}", band.radius);
    let half = band.radius / (n as f64 * h * h).sqrt();
    for i in 0..grid.len() {
        assert!((band.upper[i] - band.estimate[i] - half).abs() < 1e-12);
        assert!(band.lower[i] >= 0.0);
    }
}
