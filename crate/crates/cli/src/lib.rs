//! `semidyn`: render, classify, sample and verify holomorphic semigroup
//! dynamics from scene files.
//!
//! Exit codes: 0 success (and every verification passed), 1 a verification
//! failed, 2 usage or validation error, 3 numeric failure.

pub mod error;
pub mod ppm;
pub mod scene;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand};
use num_complex::Complex64;
use semidyn_core::classify::{
    backward_orbit_sample, classify_escaping, classify_fatou_julia, escaping_grid, fatou_julia_grid,
    julia_from_escaping_boundary, julia_grid_union, GridClassification, GridSource, Label, PointVerdict,
};
use semidyn_core::semigroup::enumerate_words;
use semidyn_core::verify::{run_check, verify_known_example, Report, SUITE};
use serde::Serialize;

pub use error::{CliError, CliResult};
use scene::{Mode, Scene, ValidScene};

#[derive(Debug, Parser)]
#[command(name = "semidyn", version, about = "Fatou, Julia and escaping sets of holomorphic semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the scene's grid and write it as a binary PPM.
    Render {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify one point with the scene's semigroup and params.
    Classify {
        #[arg(long)]
        scene: PathBuf,
        /// `re,im` (or just `re`).
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Run built-in verification reports.
    #[command(group(ArgGroup::new("what").required(true).args(["example", "suite"])))]
    Verify {
        #[arg(long)]
        example: Option<String>,
        /// `key=value` override for the example; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE", requires = "example")]
        set: Vec<String>,
        /// Only `all` is defined.
        #[arg(long, value_parser = ["all"])]
        suite: Option<String>,
        /// Also write the reports as one JSON document.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write a backward-orbit point cloud, one `re im` pair per line.
    Sample {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the words of length at most L.
    Words {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long = "max-len")]
        max_len: usize,
    },
}

/// Runs the CLI on `argv` (program name first) with the process streams.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// As [`run_cli`], writing to the given streams.
pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    match command {
        Command::Render { scene, out: path } => render(&load_scene(&scene)?, &path, out),
        Command::Classify { scene, point } => classify(&load_scene(&scene)?, &point, out),
        Command::Verify {
            example,
            set,
            suite,
            json,
        } => verify(example.as_deref(), &set, suite.is_some(), json.as_deref(), out),
        Command::Sample { scene, out: path } => sample(&load_scene(&scene)?, &path, out),
        Command::Words { scene, max_len } => words(&load_scene(&scene)?, max_len, out, err),
    }
    .inspect(|_| {
        let _ = out.flush();
    })
}

fn load_scene(path: &Path) -> CliResult<ValidScene> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Scene::parse(&text)?.validate()
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))
}

/// The scene's grid in its mode.
pub fn compute_grid(v: &ValidScene) -> CliResult<GridClassification> {
    let (s, region, p) = (&v.semigroup, &v.scene.region, &v.scene.params);
    let g = match v.scene.mode {
        Mode::Escaping => escaping_grid(s, region, p)?,
        Mode::FatouJulia => fatou_julia_grid(s, region, p)?,
        Mode::JuliaUnion => julia_grid_union(s, region, p)?,
        Mode::JuliaBoundary => julia_from_escaping_boundary(&escaping_grid(s, region, p)?)?,
        Mode::BackwardOrbit => {
            let spec = v.scene.sample_spec()?;
            let cloud = backward_orbit_sample(s, spec.z0, spec.n_points, spec.burn_in, p)?;
            let mut verdicts = vec![Label::FatouLike; region.len()];
            for z in &cloud.points {
                if let Some((col, row)) = region.locate(*z) {
                    verdicts[row * region.width + col] = Label::JuliaLike;
                }
            }
            GridClassification::new(*region, GridSource::BackwardOrbit, verdicts, *p)
        }
    };
    Ok(g)
}

fn render(v: &ValidScene, path: &Path, out: &mut dyn Write) -> CliResult<i32> {
    let g = compute_grid(v)?;
    ppm::emit_image(&g, &v.palette, path)?;
    let mut text = format!(
        "wrote {} ({}x{}, {:?})\n",
        path.display(),
        g.region.width,
        g.region.height,
        g.source
    );
    for label in Label::ALL {
        let n = g.count(label);
        if n > 0 {
            text.push_str(&format!("  {} {}\n", label.name(), n));
        }
    }
    emit(out, &text)?;
    Ok(0)
}

fn parse_point(text: &str) -> CliResult<Complex64> {
    let bad = || CliError::Usage(format!("--point expects `re,im`, got `{text}`"));
    let mut parts = text.split(',');
    let mut next = || -> CliResult<Option<f64>> {
        match parts.next() {
            None => Ok(None),
            Some(s) => s
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(bad),
        }
    };
    let re = next()?.ok_or_else(bad)?;
    let im = next()?.unwrap_or(0.0);
    if next()?.is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn classify(v: &ValidScene, point: &str, out: &mut dyn Write) -> CliResult<i32> {
    let z = parse_point(point)?;
    let (s, p) = (&v.semigroup, &v.scene.params);
    let verdict: PointVerdict = match v.scene.mode {
        Mode::Escaping | Mode::JuliaBoundary => classify_escaping(s, z, p)?,
        _ => classify_fatou_julia(s, z, p)?,
    };
    let e = verdict.evidence;
    let text = format!(
        "{}\n  point {},{}\n  divergent {}\n  bounded {}\n  slow {}\n  max_log_derivative {}\n",
        verdict.label.name(),
        z.re,
        z.im,
        e.divergent,
        e.bounded,
        e.slow,
        e.max_log_derivative
    );
    emit(out, &text)?;
    Ok(0)
}

fn parse_overrides(set: &[String]) -> CliResult<BTreeMap<String, String>> {
    set.iter()
        .map(|kv| match kv.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
            _ => Err(CliError::Usage(format!("--set expects KEY=VALUE, got `{kv}`"))),
        })
        .collect()
}

#[derive(Serialize)]
struct Skipped {
    name: String,
    note: String,
}

#[derive(Serialize)]
struct VerifyDocument<'a> {
    passed: bool,
    reports: &'a [Report],
    skipped: &'a [Skipped],
}

fn verify(
    example: Option<&str>,
    set: &[String],
    suite: bool,
    json: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    if let Some(id) = example {
        reports.push(verify_known_example(id, &parse_overrides(set)?)?);
    } else if suite {
        for name in SUITE {
            match run_check(name) {
                Ok(r) => {
                    emit(out, &r.to_string())?;
                    reports.push(r);
                }
                Err(semidyn_core::Error::Unimplemented { name, note }) => {
                    emit(out, &format!("report {name} SKIP\n  note {note}\n"))?;
                    skipped.push(Skipped { name, note });
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    if example.is_some() {
        emit(out, &reports[0].to_string())?;
    }
    let passed = reports.iter().all(|r| r.passed);
    if suite {
        emit(
            out,
            &format!(
                "suite {} passed {} failed {} skipped {}\n",
                if passed { "PASS" } else { "FAIL" },
                reports.iter().filter(|r| r.passed).count(),
                reports.iter().filter(|r| !r.passed).count(),
                skipped.len()
            ),
        )?;
    }
    if let Some(path) = json {
        let doc = VerifyDocument {
            passed,
            reports: &reports,
            skipped: &skipped,
        };
        let text = serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n";
        fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    }
    Ok(if passed { 0 } else { 1 })
}

fn sample(v: &ValidScene, path: &Path, out: &mut dyn Write) -> CliResult<i32> {
    let spec = v.scene.sample_spec()?;
    let cloud = backward_orbit_sample(&v.semigroup, spec.z0, spec.n_points, spec.burn_in, &v.scene.params)?;
    let mut text = String::with_capacity(cloud.points.len() * 40);
    for z in &cloud.points {
        text.push_str(&format!("{} {}\n", z.re, z.im));
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    emit(
        out,
        &format!(
            "wrote {} points to {} ({} dead ends)\n",
            cloud.points.len(),
            path.display(),
            cloud.dead_ends
        ),
    )?;
    Ok(0)
}

/// Words go to stdout, one per line; the count goes to stderr so the listing
/// stays pipeable.
fn words(v: &ValidScene, max_len: usize, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    if max_len == 0 {
        return Err(CliError::Usage("--max-len must be at least 1".into()));
    }
    let words = enumerate_words(&v.semigroup, max_len, v.scene.params.word_cap)?;
    let mut text = String::new();
    for w in &words {
        text.push_str(&format!("{w}\n"));
    }
    emit(out, &text)?;
    let _ = writeln!(err, "{} words", words.len());
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_parsing() {
        assert_eq!(parse_point("1,0").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_point("-2.5, 3").unwrap(), Complex64::new(-2.5, 3.0));
        assert_eq!(parse_point("4").unwrap(), Complex64::new(4.0, 0.0));
        for bad in ["", "a,b", "1,2,3", "nan,0"] {
            assert!(parse_point(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn override_parsing() {
        let m = parse_overrides(&["a=2".into(), " size = 64".into()]).unwrap();
        assert_eq!(m["a"], "2");
        assert_eq!(m["size"], "64");
        assert!(parse_overrides(&["a".into()]).is_err());
        assert!(parse_overrides(&["=1".into()]).is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run_cli_with(["semidyn", "bogus"], &mut out, &mut err), 2);
        assert_eq!(run_cli_with(["semidyn", "verify"], &mut out, &mut err), 2);
        assert_eq!(
            run_cli_with(["semidyn", "verify", "--suite", "some"], &mut out, &mut err),
            2
        );
        assert_eq!(run_cli_with(["semidyn", "--help"], &mut out, &mut err), 0);
    }
}
