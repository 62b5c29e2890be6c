//! The prove / check / export / validate commands.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};

use clv_core::engine::{prove, ProveResult, SearchLimits};
use clv_core::export::{
    export_coq, export_isar, export_natural_language, LayoutConfig, NlTarget, RenderedArtifact,
};
use clv_core::logic::{NamedFormula, Role, Theory};
use clv_core::proof::CheckResult;
use clv_core::tptp::{assemble_theory, parse_problem, AssembleOptions, IncludeResolver};
use clv_core::vernacular::{
    bundled_dtd, parse_document, serialize_document, validate_document, Chapter, ChapterItem,
    DocumentError, Frontpage, HrefResolver, VernacularDocument,
};

use crate::{FrontpageArgs, SearchArgs};

/// Resolves TPTP includes against the including file's directory.
pub struct FsResolver;

impl IncludeResolver for FsResolver {
    fn resolve(&self, from: &str, path: &str) -> Result<(String, String), String> {
        let base = Path::new(from).parent().unwrap_or_else(|| Path::new("."));
        let joined = base.join(path);
        let canonical = joined
            .canonicalize()
            .map_err(|e| format!("{}: {e}", joined.display()))?;
        let text = std::fs::read_to_string(&canonical).map_err(|e| e.to_string())?;
        Ok((canonical.display().to_string(), text))
    }
}

/// Resolves xi:include hrefs against the document's directory.
pub struct FsHrefResolver {
    pub base: PathBuf,
}

impl HrefResolver for FsHrefResolver {
    fn resolve(&self, href: &str) -> Result<String, String> {
        let p = self.base.join(href);
        std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))
    }
}

pub fn stem_of(path: &str) -> String {
    Path::new(path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "document".into())
}

pub fn limits_from(args: &SearchArgs) -> SearchLimits {
    SearchLimits {
        max_steps: args.max_steps,
        max_splits: args.max_splits,
        wall_clock: Duration::from_secs(args.timeout),
        ..Default::default()
    }
}

pub fn frontpage_from(args: &FrontpageArgs) -> Frontpage {
    Frontpage {
        author: args.author.clone(),
        prover: args.prover.clone(),
        date: args
            .date
            .clone()
            .unwrap_or_else(|| chrono::Local::now().date_naive().to_string()),
    }
}

pub fn load_problem(
    input: &str,
    add_equality_decidability: bool,
    theory_name: &str,
) -> Result<(Theory, Vec<NamedFormula>)> {
    let text =
        std::fs::read_to_string(input).with_context(|| format!("cannot read {input}"))?;
    let problem = parse_problem(&text, input, &FsResolver)?;
    let (theory, conjectures) = assemble_theory(
        &problem,
        &AssembleOptions {
            theory_name: theory_name.to_string(),
            add_equality_decidability,
        },
    )?;
    theory.validate().context("assembled theory is ill-formed")?;
    Ok((theory, conjectures))
}

pub fn read_hints(path: &str) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

pub fn prove_status(result: &ProveResult) -> &'static str {
    match result {
        ProveResult::Proved(..) => "PROVED",
        ProveResult::Exhausted { .. } => "EXHAUSTED",
        ProveResult::Timeout { .. } => "TIMEOUT",
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_prove(
    input: &str,
    output: Option<&str>,
    hints: Option<&str>,
    no_equality_decidability: bool,
    theory_name: Option<&str>,
    search: &SearchArgs,
    frontpage: &FrontpageArgs,
) -> Result<ExitCode> {
    let stem = stem_of(input);
    let theory_name = theory_name.map(str::to_string).unwrap_or_else(|| stem.clone());
    let (theory, conjectures) = load_problem(input, !no_equality_decidability, &theory_name)?;
    if conjectures.is_empty() {
        bail!("{input} contains no conjecture");
    }
    let hints = hints.map(read_hints).transpose()?;
    let limits = limits_from(search);

    let mut all_proved = true;
    let mut chapters = Vec::new();
    for conjecture in &conjectures {
        let result = prove(&theory, conjecture, &limits, hints.as_deref())?;
        match &result {
            ProveResult::Proved(tree, stats) => {
                println!(
                    "PROVED {} ({:.3} s, {} steps)",
                    conjecture.name,
                    stats.elapsed.as_secs_f64(),
                    stats.proof_size
                );
                chapters.push(Chapter {
                    name: conjecture.name.clone(),
                    items: vec![ChapterItem {
                        formula: NamedFormula {
                            name: conjecture.name.clone(),
                            role: Role::Theorem,
                            formula: conjecture.formula.clone(),
                        },
                        proofs: vec![(**tree).clone()],
                    }],
                });
            }
            other => {
                println!("{} {}", prove_status(other), conjecture.name);
                all_proved = false;
                chapters.push(Chapter {
                    name: conjecture.name.clone(),
                    items: vec![ChapterItem {
                        formula: conjecture.clone(),
                        proofs: vec![],
                    }],
                });
            }
        }
    }

    let doc = VernacularDocument {
        frontpage: frontpage_from(frontpage),
        theory,
        chapters,
    };
    let out_path = output
        .map(str::to_string)
        .unwrap_or_else(|| format!("{stem}.xml"));
    write_with_dtd(Path::new(&out_path), &serialize_document(&doc))?;
    Ok(if all_proved {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Writes a document and puts the schema beside it so the DOCTYPE resolves.
pub fn write_with_dtd(path: &Path, xml: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, xml).with_context(|| format!("cannot write {}", path.display()))?;
    let dtd = path.with_file_name("Vernacular.dtd");
    std::fs::write(&dtd, bundled_dtd())
        .with_context(|| format!("cannot write {}", dtd.display()))?;
    Ok(())
}

pub fn load_document(input: &str) -> Result<VernacularDocument, DocumentError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| DocumentError::Xml(format!("cannot read {input}: {e}")))?;
    let base = Path::new(input)
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    parse_document(&text, &FsHrefResolver { base })
}

pub fn cmd_check(input: &str) -> Result<ExitCode> {
    let doc = load_document(input)?;
    let results = doc.check();
    if results.is_empty() {
        println!("NOTHING TO CHECK (no proofs in {input})");
        return Ok(ExitCode::SUCCESS);
    }
    let mut ok = true;
    for (name, r) in &results {
        match r {
            CheckResult::Ok => println!("OK {name}"),
            CheckResult::Violation { path, rule, detail } => {
                ok = false;
                println!("VIOLATION {name} at [{path}] ({rule}): {detail}");
            }
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

pub fn cmd_validate(input: &str) -> Result<ExitCode> {
    let text =
        std::fs::read_to_string(input).with_context(|| format!("cannot read {input}"))?;
    let violations = validate_document(&text);
    if violations.is_empty() {
        println!("VALID {input}");
        Ok(ExitCode::SUCCESS)
    } else {
        for v in &violations {
            println!("INVALID {v}");
        }
        Ok(ExitCode::from(2))
    }
}

fn write_artifact(dir: &Path, name: &str, artifact: &RenderedArtifact) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), &artifact.main_file)?;
    for (aux, content) in &artifact.auxiliary_files {
        std::fs::write(dir.join(aux), content)?;
    }
    Ok(())
}

pub fn cmd_export(
    input: &str,
    targets: &[String],
    layout: Option<&str>,
    output_dir: Option<&str>,
) -> Result<ExitCode> {
    let doc = match load_document(input) {
        Ok(d) => d,
        Err(DocumentError::Schema(violations)) => {
            for v in &violations {
                eprintln!("INVALID {v}");
            }
            bail!("{input} does not conform to the schema");
        }
        Err(e) => return Err(e.into()),
    };
    let layout = match layout {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("cannot read {p}"))?;
            LayoutConfig::parse(&text)?
        }
        None => LayoutConfig::default(),
    };
    let stem = stem_of(input);
    let dir = output_dir
        .map(PathBuf::from)
        .or_else(|| Path::new(input).parent().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));

    for target in targets {
        match target.as_str() {
            "isar" => {
                let a = export_isar(&doc, &stem)?;
                write_artifact(&dir, &format!("{stem}.thy"), &a)?;
                println!("WROTE {}", dir.join(format!("{stem}.thy")).display());
            }
            "coq" => {
                let a = export_coq(&doc, &stem)?;
                write_artifact(&dir, &format!("{stem}.v"), &a)?;
                println!("WROTE {}", dir.join(format!("{stem}.v")).display());
            }
            "tex" => {
                let a = export_natural_language(&doc, &layout, NlTarget::Latex)?;
                write_artifact(&dir, &format!("{stem}.tex"), &a)?;
                println!("WROTE {}", dir.join(format!("{stem}.tex")).display());
            }
            "html" => {
                let a = export_natural_language(&doc, &layout, NlTarget::Html)?;
                write_artifact(&dir, &format!("{stem}.html"), &a)?;
                println!("WROTE {}", dir.join(format!("{stem}.html")).display());
            }
            "txt" => {
                let a = export_natural_language(&doc, &layout, NlTarget::Plain)?;
                write_artifact(&dir, &format!("{stem}.txt"), &a)?;
                println!("WROTE {}", dir.join(format!("{stem}.txt")).display());
            }
            "xml" => {
                std::fs::create_dir_all(&dir)?;
                write_with_dtd(&dir.join(format!("{stem}.xml")), &serialize_document(&doc))?;
                println!("WROTE {}", dir.join(format!("{stem}.xml")).display());
            }
            other => bail!("unknown export target {other} (isar, coq, tex, html, txt, xml)"),
        }
    }
    Ok(ExitCode::SUCCESS)
}
