use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use specgan_core::analysis::export::{
    class_stats_csv, class_stats_svg, interpolation_csv, interpolation_points, interpolation_svg, projection_csv,
    projection_points, projection_svg, separation_csv, write_text,
};
use specgan_core::analysis::{class_stats, fit_pca2, project, separation_table, SvmConfig};
use specgan_core::augment::{reports_csv, reports_json, run_ratio_sweep, AugmentConfig};
use specgan_core::dataio::{
    decode_label_map, load_cube, normalize_reflectance, read_table, split, write_table, CubeHeader, SplitSpec,
};
use specgan_core::gan::{sample_latent, train_with, write_loss_log};
use specgan_core::seed::{derive_seed, stream};
use specgan_core::synth::{mini_cube, mini_cube_raw, MiniCubeConfig};
use specgan_core::{GanCheckpoint, SpectraTable};

use crate::config::RunConfig;
use crate::failure::Failure;

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::data(format!("cannot read {}: {e}", path.display())))
}

fn ensure_parent(path: &Path) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

pub fn synth(out: &Path, raw_dir: Option<&Path>, seed: u64) -> Outcome {
    let cfg = MiniCubeConfig { seed, ..MiniCubeConfig::default() };
    ensure_parent(out)?;
    write_table(out, &mini_cube(&cfg)?)?;
    if let Some(dir) = raw_dir {
        let (header, payload, labels) = mini_cube_raw(&cfg)?;
        fs::create_dir_all(dir)?;
        fs::write(dir.join("cube.hdr"), header.to_text())?;
        fs::write(dir.join("cube.raw"), payload)?;
        fs::write(dir.join("labels.raw"), specgan_core::dataio::encode_label_map(&labels))?;
    }
    Ok(())
}

pub fn convert(header: &Path, payload: &Path, labels: &Path, out: &Path, normalize: bool) -> Outcome {
    let text = fs::read_to_string(header).map_err(|e| Failure::data(format!("cannot read {}: {e}", header.display())))?;
    let header = CubeHeader::parse(&text)?;
    let label_map = decode_label_map(&read(labels)?)?;
    let mut table = load_cube(&header, &read(payload)?, &label_map)?;
    if normalize {
        let (normalized, warning) = normalize_reflectance(&table)?;
        if let Some(w) = warning {
            log::warn!("{w}");
        }
        table = normalized;
    }
    ensure_parent(out)?;
    write_table(out, &table)?;
    Ok(())
}

pub fn train(cfg: &RunConfig) -> Outcome {
    let table = read_table(cfg.data_path()?)?;
    let gan = cfg.gan()?;
    let dir = cfg.out_dir()?;
    let outcome = train_with(&table, &gan, |ckpt| {
        ckpt.write(dir.join(format!("checkpoint_{:08}.hsgn", ckpt.iteration)))
    })?;
    outcome.checkpoint.write(dir.join("final.hsgn"))?;
    write_loss_log(dir.join("losses.csv"), &outcome.log)?;
    log::info!("trained {} iterations into {}", outcome.checkpoint.iteration, dir.display());
    Ok(())
}

pub fn sample(checkpoint: &Path, class: u16, n: usize, seed: u64, out: &Path) -> Outcome {
    let ckpt = GanCheckpoint::read(checkpoint)?;
    let table = ckpt.sample(class, n, seed)?;
    ensure_parent(out)?;
    write_table(out, &table)?;
    Ok(())
}

pub struct InterpolationRequest {
    pub from_class: u16,
    pub to_class: u16,
    pub steps: usize,
    pub seed: u64,
    pub fixed_noise: bool,
}

/// Writes `<out>.hsit`, `<out>.csv` and `<out>.svg`.
pub fn interpolate(checkpoint: &Path, req: &InterpolationRequest, out: &Path) -> Outcome {
    let ckpt = GanCheckpoint::read(checkpoint)?;
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let z = sample_latent(&mut rng, 2, ckpt.latent_dim());
    let z1 = if req.fixed_noise { z.row(0) } else { z.row(1) };
    let path = ckpt.interpolate(z.row(0), z1, req.from_class, req.to_class, req.steps)?;
    ensure_parent(out)?;
    write_table(with_ext(out, "hsit"), &path)?;
    let points = interpolation_points(&path);
    write_text(with_ext(out, "csv"), &interpolation_csv(&points))?;
    write_text(with_ext(out, "svg"), &interpolation_svg(&points))?;
    Ok(())
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Halves a labeled table at random for SVM training and testing.
/// `n` rows drawn without replacement, in original order.
fn subsample(table: &SpectraTable, n: usize, seed: u64) -> SpectraTable {
    let mut rows = rand::seq::index::sample(&mut ChaCha8Rng::seed_from_u64(seed), table.n_rows(), n).into_vec();
    rows.sort_unstable();
    table.select(&rows)
}

fn halves(table: &SpectraTable, seed: u64) -> Result<(SpectraTable, SpectraTable), Failure> {
    let parts = split(table, &SplitSpec::RandomFraction { fraction: 0.5, seed })?;
    Ok((parts.train, parts.test))
}

pub fn analyze(real: &Path, fakes: &[PathBuf], out_dir: &Path, seed: u64, svm: SvmConfig) -> Outcome {
    let real = read_table(real)?.labeled();
    let mut fake = SpectraTable::empty(real.n_bands(), real.n_classes());
    for path in fakes {
        fake = fake.concat(&read_table(path)?)?;
    }
    let fake = fake.labeled();
    fs::create_dir_all(out_dir)?;

    let real_stats = class_stats(&real)?;
    let fake_stats = class_stats(&fake)?;
    write_text(out_dir.join("class_stats_real.csv"), &class_stats_csv(&real_stats))?;
    write_text(out_dir.join("class_stats_fake.csv"), &class_stats_csv(&fake_stats))?;
    write_text(out_dir.join("class_stats_real.svg"), &class_stats_svg(&real_stats))?;
    write_text(out_dir.join("class_stats_fake.svg"), &class_stats_svg(&fake_stats))?;

    let pca_seed = derive_seed(seed, stream::AUGMENT);
    let n = real.n_rows().min(fake.n_rows());
    let basis = subsample(&real, n, pca_seed).spectra().vstack(subsample(&fake, n, pca_seed).spectra())?;
    let pca = fit_pca2(&basis)?;
    let mut points = projection_points("real", &real, &project(&pca, real.spectra())?);
    points.extend(projection_points("fake", &fake, &project(&pca, fake.spectra())?));
    write_text(out_dir.join("projection.csv"), &projection_csv(&points))?;
    write_text(out_dir.join("projection.svg"), &projection_svg(&points))?;

    let split_seed = derive_seed(seed, stream::SPLIT);
    let (real_train, real_test) = halves(&real, split_seed)?;
    let (fake_train, fake_test) = halves(&fake, split_seed)?;
    let grid = separation_table(&real_train, &real_test, &fake_train, &fake_test, &SvmConfig {
        seed: derive_seed(seed, stream::CLASSIFIER),
        ..svm
    })?;
    write_text(out_dir.join("separation.csv"), &separation_csv(&grid))?;
    Ok(())
}

pub fn augment_eval(cfg: &RunConfig) -> Outcome {
    let table = read_table(cfg.data_path()?)?;
    let gan = cfg.gan()?;
    let base = cfg.augment()?;
    let spec = cfg.split_spec(&table)?;
    let dataset = cfg.raw("dataset").to_string();
    let sweep = cfg.ratio_sweep()?;
    let mut reports = Vec::new();
    for strategy in cfg.strategies()? {
        let augment = AugmentConfig { strategy, ..base.clone() };
        let ratios = if sweep.is_empty() { vec![augment.fake_ratio] } else { sweep.clone() };
        let batch = run_ratio_sweep(&dataset, &table, &spec, &augment, &gan, &ratios)?;
        for r in &batch {
            log::info!("{} {} ratio {}: OA {:.4}", r.split, r.strategy, r.fake_ratio, r.overall_accuracy);
        }
        reports.extend(batch);
    }
    let dir = cfg.out_dir()?;
    write_text(dir.join("report.csv"), &reports_csv(&reports))?;
    write_text(dir.join("report.json"), &reports_json(&reports))?;
    Ok(())
}
