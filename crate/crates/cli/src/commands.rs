use std::fs;
use std::path::Path;

use ellipsep_core::bench::{self, RunManifest};
use ellipsep_core::io::{self, StateFile, WitnessFile};
use ellipsep_core::mvce::{self, FitOptions};
use ellipsep_core::{
    canonical_separable_ensemble, classify as classify_vector, fit_mvce_with, gell_mann_basis,
    project_to_ellipsoid, tangent_witness, vectorize, DensityOperator, Dims, Ellipsoid, Error, Label,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ENTANGLED: u8 = 1;
pub const EXIT_DEGENERATE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_IO: u8 = 74;

fn report(err: &Error) -> u8 {
    eprintln!("error: {err}");
    match err {
        Error::Degenerate { .. } => EXIT_DEGENERATE,
        Error::NumericalFailure { .. } => EXIT_NUMERICAL,
        Error::InvalidDimension { .. } | Error::InvalidParameter(_) | Error::UnsupportedLabeling { .. } => EXIT_USAGE,
        Error::NotHermitian { .. } | Error::InvalidState(_) | Error::DimensionMismatch { .. } | Error::Json(_) => EXIT_DATA,
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        Error::NotExterior { .. } => EXIT_ENTANGLED,
        Error::EmptyEnsemble => EXIT_DATA,
    }
}

fn parse_dims(s: &str) -> Result<Dims, u8> {
    s.parse().map_err(|e| report(&e))
}

pub fn fit(dims: &str, norm: f64, epsilon: f64, ridge: bool, out: &Path) -> u8 {
    let dims = match parse_dims(dims) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let run = || -> Result<Ellipsoid, Error> {
        let ensemble = canonical_separable_ensemble(dims.a, dims.b, norm)?;
        let opts = FitOptions { epsilon, ridge: ridge.then_some(mvce::DEFAULT_RIDGE), ..FitOptions::default() };
        let mut e = fit_mvce_with(&ensemble.points(), &opts)?;
        e.meta.dim_a = Some(dims.a);
        e.meta.dim_b = Some(dims.b);
        e.meta.target_norm = Some(norm);
        e.meta.basis_tag = Some(ellipsep_core::state_space::BASIS_TAG.to_string());
        io::write_ellipsoid(out, &e)?;
        Ok(e)
    };
    match run() {
        Ok(e) => {
            println!(
                "wrote {} (dim {}, {} iterations, log volume {:.6})",
                out.display(),
                e.dim(),
                e.meta.solver_iterations,
                mvce::log_volume(&e)
            );
            EXIT_OK
        }
        Err(err) => report(&err),
    }
}

fn load(model: &Path, state: &Path) -> Result<(Ellipsoid, DensityOperator), u8> {
    let e = io::read_ellipsoid(model).map_err(|e| report(&e))?;
    let file: StateFile = io::read_json(state).map_err(|e| report(&e))?;
    let rho = file.to_density_operator().map_err(|err| {
        eprintln!("error: invalid state: {err}");
        EXIT_DATA
    })?;
    let n = rho.dim();
    if n * n - 1 != e.dim() {
        eprintln!("error: state of dimension {n} does not match model of dimension {}", e.dim());
        return Err(EXIT_DATA);
    }
    if let (Some(a), Some(b)) = (e.meta.dim_a, e.meta.dim_b) {
        if (a, b) != (rho.dims().a, rho.dims().b) {
            eprintln!("error: state dims {} differ from model dims {a}x{b}", rho.dims());
            return Err(EXIT_DATA);
        }
    }
    Ok((e, rho))
}

pub fn classify(model: &Path, state: &Path) -> u8 {
    let (e, rho) = match load(model, state) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let run = || -> Result<u8, Error> {
        let basis = gell_mann_basis(rho.dim())?;
        let r = vectorize(&rho, &basis)?;
        let label = classify_vector(&e, &r, e.fit_epsilon())?;
        let q = e.quadratic_form(r.components())?;
        let proj = project_to_ellipsoid(&e, r.components())?;
        let name = match label {
            Label::Separable => "separable",
            Label::Entangled => "entangled",
        };
        println!("label: {name}");
        println!("distance: {:.12e}", proj.distance);
        println!("hs_distance: {:.12e}", proj.distance * basis.frobenius_scale());
        println!("quadratic_form: {q:.12e}");
        Ok(if label == Label::Separable { EXIT_OK } else { EXIT_ENTANGLED })
    };
    run().unwrap_or_else(|err| report(&err))
}

pub fn witness(model: &Path, state: &Path, out: &Path) -> u8 {
    let (e, rho) = match load(model, state) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let run = || -> Result<(), Error> {
        let basis = gell_mann_basis(rho.dim())?;
        let r = vectorize(&rho, &basis)?;
        let w = tangent_witness(&e, r.components(), &basis)?;
        io::write_json(out, &WitnessFile::from(&w))?;
        println!("wrote {} (value at state {:.12e})", out.display(), w.evaluate(r.components()));
        Ok(())
    };
    match run() {
        Ok(()) => EXIT_OK,
        Err(Error::NotExterior { quadratic_form }) => {
            eprintln!("state is not outside the ellipsoid (quadratic form {quadratic_form}); no witness written");
            EXIT_ENTANGLED
        }
        Err(err) => report(&err),
    }
}

fn finish<T: serde::Serialize>(out_dir: &Path, name: &str, rows: &[T], manifest: &RunManifest) -> Result<(), Error> {
    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("{name}.csv"));
    bench::write_csv(&csv_path, rows)?;
    io::write_json(out_dir.join(format!("{name}.manifest.json")), manifest)?;
    println!("wrote {}", csv_path.display());
    Ok(())
}

pub fn bench_confusion(dims: &str, norms: Option<Vec<f64>>, per_class: usize, seed: u64, epsilon: f64, out_dir: &Path) -> u8 {
    let dims = match parse_dims(dims) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let norms = norms.unwrap_or_else(bench::default_norms);
    let run = || -> Result<(), Error> {
        let table = bench::run_confusion_experiment(dims.a, dims.b, per_class, &norms, seed, epsilon)?;
        let mut manifest = RunManifest::new("confusion", dims, Some(seed), norms.clone(), per_class, epsilon);
        manifest.fits = table.fits;
        finish(out_dir, "confusion", &table.rows, &manifest)
    };
    run().map(|_| EXIT_OK).unwrap_or_else(|err| report(&err))
}

pub fn bench_be_scan(norms: Option<Vec<f64>>, count: usize, epsilon: f64, out_dir: &Path) -> u8 {
    let norms = norms.unwrap_or_else(bench::default_norms);
    let run = || -> Result<(), Error> {
        let table = bench::run_be_detection(&norms, count, epsilon)?;
        let mut manifest = RunManifest::new("be-scan", Dims { a: 3, b: 3 }, None, norms.clone(), count, epsilon);
        manifest.fits = table.fits;
        finish(out_dir, "be-scan", &table.rows, &manifest)
    };
    run().map(|_| EXIT_OK).unwrap_or_else(|err| report(&err))
}

pub fn bench_distance(dims: &str, norm: f64, count: usize, seed: u64, epsilon: f64, out_dir: &Path) -> u8 {
    let dims = match parse_dims(dims) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let run = || -> Result<(), Error> {
        let rows = bench::run_distance_comparison(dims.a, dims.b, count, norm, seed, epsilon)?;
        let (e, size) = bench::fit_canonical(dims, norm, epsilon)?;
        let mut manifest = RunManifest::new("distance-compare", dims, Some(seed), vec![norm], count, epsilon);
        manifest.fits = vec![bench::FitSummary::from_ellipsoid(&e, size)];
        finish(out_dir, "distance-compare", &rows, &manifest)
    };
    run().map(|_| EXIT_OK).unwrap_or_else(|err| report(&err))
}

pub fn bench_be_curve(norm: f64, count: usize, epsilon: f64, out_dir: &Path) -> u8 {
    let run = || -> Result<(), Error> {
        let curve = bench::run_be_norm_distance(norm, count, epsilon)?;
        let mut manifest = RunManifest::new("be-curve", Dims { a: 3, b: 3 }, None, vec![norm], count, epsilon);
        manifest.fits = vec![curve.ellipsoid.clone()];
        manifest.linear_fit = Some(curve.fit.clone());
        println!("slope {:.6} intercept {:.6} r^2 {:.6}", curve.fit.slope, curve.fit.intercept, curve.fit.r_squared);
        finish(out_dir, "be-curve", &curve.rows, &manifest)
    };
    run().map(|_| EXIT_OK).unwrap_or_else(|err| report(&err))
}
