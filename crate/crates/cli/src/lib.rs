//! `symlap` command-line driver.

pub mod config;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use symlap_core::discretization::Assembly;
use symlap_core::io::{self, Provenance};
use symlap_core::models::MeshRecipe;
use symlap_core::spectral::eig_with;
use symlap_core::verify::{default_suite, full_report, killing_number, ManifoldInput, MeshContext, Status};
use symlap_core::{Error, IntrinsicMesh, OperatorPair, Result};

pub use config::{RunConfig, VERSION};

#[derive(Debug, Parser)]
#[command(name = "symlap", version, about = "Yano rough Laplacian on surface meshes")]
struct Cli {
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    kernel_threshold: Option<f64>,
    #[arg(long, global = true)]
    class_threshold: Option<f64>,
    #[arg(long, global = true)]
    equality: Option<f64>,
    /// Directory relative output paths are resolved against
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed_label: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a mesh from a recipe such as `icosphere:4`
    Gen {
        recipe: String,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Export an operator's stiffness (and `<name>.mass.mtx`) as Matrix Market
    Assemble {
        mesh: PathBuf,
        #[arg(long, value_enum)]
        op: OpKind,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Lowest eigenpairs of an operator as CSV
    Spectrum {
        mesh: PathBuf,
        #[arg(long, value_enum, default_value = "yano")]
        op: OpKind,
        #[arg(short = 'k')]
        count: Option<usize>,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Tag the eigenforms listed in a Δ_sym spectrum CSV
    Classify {
        mesh: PathBuf,
        spectrum: PathBuf,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Run the theorem checks
    Verify {
        /// `default`, mesh JSON files or recipes
        #[arg(long, num_args = 1..)]
        suite: Vec<String>,
        #[arg(short = 'o')]
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpKind {
    Yano,
    Hodge,
    Bochner,
    Ric,
}

impl OpKind {
    fn pick(self, asm: &Assembly) -> &OperatorPair {
        match self {
            OpKind::Yano => &asm.yano,
            OpKind::Hodge => &asm.hodge_vec,
            OpKind::Bochner => &asm.bochner,
            OpKind::Ric => &asm.ric,
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code: 0 all pass or skipped, 1 a check failed, 2 bad input
/// or solver error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = cli.tol {
        cfg.tol = v;
    }
    if let Some(v) = cli.kernel_threshold {
        cfg.kernel_threshold = v;
    }
    if let Some(v) = cli.class_threshold {
        cfg.class_threshold = v;
    }
    if let Some(v) = cli.equality {
        cfg.equality = v;
    }
    if let Some(v) = &cli.out_dir {
        cfg.output_dir = v.clone();
    }
    if let Some(v) = &cli.seed_label {
        cfg.seed_label = v.clone();
    }
    match &cli.command {
        Command::Gen { recipe, .. } => cfg.recipes = vec![recipe.clone()],
        Command::Spectrum { count: Some(k), .. } => cfg.count = *k,
        Command::Verify { suite, .. } if !suite.is_empty() => cfg.recipes = suite.clone(),
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<i32> {
    let cfg = run_config(&cli)?;
    let prov = Provenance::new(VERSION, cfg.checksum());
    match &cli.command {
        Command::Gen { recipe, output } => {
            let recipe: MeshRecipe = recipe.parse()?;
            let mesh = recipe.build()?;
            let mut meta = provenance_meta(&prov);
            meta.insert("recipe".into(), recipe.to_string().into());
            io::write_mesh_json(&create_target(&cfg, output)?, &mesh, meta)?;
            println!("{}: V={} E={} F={}", recipe, mesh.n_vertices(), mesh.n_edges(), mesh.n_faces());
        }
        Command::Assemble { mesh, op, output } => {
            let asm = Assembly::new(load_mesh(mesh)?)?;
            let pair = op.pick(&asm);
            let path = create_target(&cfg, output)?;
            let what = format!("operator {} stiffness", pair.label);
            write_file(&path, |w| io::write_matrix_market(w, &pair.stiffness, &io::provenance_comments(&prov, &what)))?;
            let mass_path = mass_path(&path);
            let what = format!("operator {} mass", pair.label);
            write_file(&mass_path, |w| io::write_matrix_market(w, &pair.mass, &io::provenance_comments(&prov, &what)))?;
            println!("{}: dim {} -> {}, {}", pair.label, pair.dim(), path.display(), mass_path.display());
        }
        Command::Spectrum { mesh, op, output, .. } => {
            let ctx = MeshContext::new(mesh_name(mesh), load_mesh(mesh)?, None, cfg.verify_config())?;
            let pair = op.pick(&ctx.asm);
            let spec = eig_with(pair, cfg.count.min(pair.dim()), &ctx.options(pair), None)?;
            write_file(&create_target(&cfg, output)?, |w| io::write_spectrum_csv(w, &spec, &prov))?;
            for p in &spec.pairs {
                println!("{:.10}", p.lambda);
            }
        }
        Command::Classify { mesh, spectrum, output } => {
            let rows = io::read_spectrum_csv(File::open(spectrum)?)?;
            if rows.is_empty() {
                return Err(Error::Parse(format!("{}: no eigenpairs", spectrum.display())));
            }
            let vcfg = symlap_core::verify::VerifyConfig {
                count: rows.len(),
                ..cfg.verify_config()
            };
            let ctx = MeshContext::new(mesh_name(mesh), load_mesh(mesh)?, None, vcfg)?;
            let spec = ctx.yano_spectrum()?;
            let scale = spec.norm_estimate.max(1.0);
            for (row, pair) in rows.iter().zip(&spec.pairs) {
                if (row.lambda - pair.lambda).abs() > 1e-6 * scale {
                    return Err(Error::Parse(format!(
                        "{}: eigenvalue {} is {} but the recomputed Δ_sym spectrum has {}",
                        spectrum.display(),
                        row.index,
                        row.lambda,
                        pair.lambda
                    )));
                }
            }
            let classified = ctx.classified()?;
            let forms: Vec<Value> = classified
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    json!({
                        "index": i,
                        "lambda": p.lambda,
                        "tags": p.class.tags,
                        "residuals": p.class.residuals,
                        "divergence": p.class.divergence,
                    })
                })
                .collect();
            let doc = json!({
                "config": cfg.to_json(),
                "mesh": ctx.name,
                "thresholds": ctx.thresholds()?,
                "killing_number": killing_number(&ctx)?,
                "eigenforms": forms,
            });
            write_json(&create_target(&cfg, output)?, &doc)?;
            for p in classified {
                let tags: Vec<&str> = p.class.tags.iter().map(|t| t.name()).collect();
                println!("{:.10} {}", p.lambda, tags.join(","));
            }
        }
        Command::Verify { output, .. } => {
            let inputs = suite_inputs(&cfg.recipes)?;
            let doc = full_report(&inputs, &cfg.verify_config(), cfg.to_json());
            write_json(&create_target(&cfg, output)?, &doc)?;
            print!("{}", doc.summary_text());
            return Ok(match doc.overall() {
                Status::Pass | Status::Skipped => 0,
                Status::Fail => 1,
                Status::Error => 2,
            });
        }
    }
    Ok(0)
}

fn provenance_meta(prov: &Provenance) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("version".into(), prov.version.clone().into());
    meta.insert("config_checksum".into(), prov.config_checksum.clone().into());
    meta
}

fn suite_inputs(entries: &[String]) -> Result<Vec<ManifoldInput>> {
    if entries.is_empty() {
        return Ok(default_suite());
    }
    let mut out = Vec::new();
    for e in entries {
        if e == "default" {
            out.extend(default_suite());
        } else if e.ends_with(".json") || Path::new(e).exists() {
            let path = Path::new(e);
            out.push(ManifoldInput::Mesh {
                name: mesh_name(path),
                mesh: load_mesh(path)?,
            });
        } else {
            out.push(ManifoldInput::Recipe(e.parse()?));
        }
    }
    Ok(out)
}

fn mesh_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn load_mesh(path: &Path) -> Result<IntrinsicMesh> {
    let file = io::read_mesh_json(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    file.to_mesh()
}

fn mass_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.mass.mtx"))
}

fn create_target(cfg: &RunConfig, output: &Path) -> Result<PathBuf> {
    let path = cfg.output_path(output);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(path)
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    write_file(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")?;
        Ok(())
    })
}
