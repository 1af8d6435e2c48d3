use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use hyq_core::host::{evaluate, parse_program, render_sequence, Environment, Item, OutputFormat};
use hyq_core::owl::{entities_to_xml, load_ontology, ClassExpr, Ontology};
use hyq_core::rdf::{parse_rdfxml, parse_rdfxml_document, write_sparql_results, Iri, RdfGraph};
use hyq_core::reasoner::{Profile, Reasoner};
use hyq_core::sparql::{eval_select, parse_sparql};
use hyq_core::xml::{parse_xml_with_uri, serialize_node, serialize_xml, NodeRef, QName};

/// Program that lifts a conference document into the papers ontology.
const MAPPING: &str = include_str!("../../../fixtures/mapping.xq");

#[derive(Parser)]
#[command(name = "hyq", version, about = "Query XML and RDF, and reason over OWL ontologies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Xml,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program file. The first --data document is the context item.
    Run {
        program: PathBuf,
        #[arg(long = "data")]
        data: Vec<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Pass builtin results through temporary files.
        #[arg(long)]
        temp_files: bool,
    },
    /// Run a SPARQL SELECT query over the merged --data graphs.
    Query {
        query: String,
        #[arg(long = "data", required = true)]
        data: Vec<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Ask the reasoner one question about an ontology.
    Reason {
        /// consistent, instances, subclasses, values, instance-of, holds or subsumed.
        task: Option<String>,
        ontology: Option<PathBuf>,
        #[arg(long = "task", id = "task_flag")]
        task_flag: Option<String>,
        #[arg(long = "ontology", id = "ontology_flag")]
        ontology_flag: Option<PathBuf>,
        #[arg(long)]
        class: Option<String>,
        /// Second class for `subsumed`.
        #[arg(long)]
        superclass: Option<String>,
        #[arg(long)]
        individual: Option<String>,
        #[arg(long)]
        property: Option<String>,
        /// Second individual for `holds`.
        #[arg(long)]
        object: Option<String>,
        /// Only direct subclasses.
        #[arg(long)]
        direct: bool,
        #[arg(long, default_value = "hermit")]
        profile: String,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Map a conference document into the papers ontology and check it.
    Check {
        #[arg(long = "data")]
        data: PathBuf,
        /// TBox to merge; defaults to ontology_papers.owl next to the data.
        #[arg(long)]
        ontology: Option<PathBuf>,
        /// Where to write the merged ontology.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "hermit")]
        profile: String,
    },
}

enum Failure {
    Usage(String),
    Eval(String),
}

type Outcome = Result<String, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn eval_err(e: impl std::fmt::Display) -> Failure {
    Failure::Eval(e.to_string())
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn absolute(path: &Path) -> PathBuf {
    std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf())
}

fn file_uri(path: &Path) -> String {
    format!("file://{}", absolute(path).display())
}

fn load_graph(path: &Path) -> Result<RdfGraph, Failure> {
    let text = read_input(path)?;
    parse_rdfxml(&text, &file_uri(path)).map_err(|e| eval_err(format!("{}: {e}", path.display())))
}

fn load_reasoner(path: &Path, profile: &str) -> Result<Reasoner, Failure> {
    let profile: Profile = profile.parse().map_err(|e| usage(format!("{e}")))?;
    let graph = load_graph(path)?;
    let ont = load_ontology(&graph).map_err(|e| eval_err(format!("{}: {e}", path.display())))?;
    Ok(Reasoner::new(Arc::new(ont), profile))
}

fn cmd_run(program: &Path, data: &[PathBuf], format: OutputFormat, temp_files: bool) -> Outcome {
    let text = read_input(program)?;
    let parsed = parse_program(&text).map_err(|e| eval_err(format!("{}: {e}", program.display())))?;
    let context = match data.first() {
        Some(path) => {
            let text = read_input(path)?;
            let doc = parse_xml_with_uri(&text, Some(file_uri(path)))
                .map_err(|e| eval_err(format!("{}: {e}", path.display())))?;
            Some(NodeRef::root_of(&doc))
        }
        None => None,
    };
    let base_dir = absolute(program).parent().map(Path::to_path_buf).unwrap_or_default();
    let env = Environment { base_dir, context, external: Vec::new(), temp_files };
    let seq = evaluate(&parsed, &env).map_err(eval_err)?;
    Ok(render_sequence(&seq, format))
}

fn cmd_query(query: &str, data: &[PathBuf]) -> Outcome {
    let mut graphs = Vec::new();
    for path in data {
        graphs.push(load_graph(path)?);
    }
    let base = graphs.first().map(|g| g.base().to_string()).unwrap_or_default();
    let graph = RdfGraph::from_triples(base, graphs.iter().flat_map(|g| g.triples().iter().cloned()));
    let query = parse_sparql(query).map_err(eval_err)?;
    Ok(serialize_xml(&write_sparql_results(&eval_select(&graph, &query)), true))
}

fn need<'a>(value: &'a Option<String>, flag: &str, task: &str) -> Result<&'a str, Failure> {
    value.as_deref().ok_or_else(|| usage(format!("task `{task}` needs --{flag}")))
}

fn entity_output(iris: Vec<Iri>, format: OutputFormat, wrapper: &str, item: &str) -> String {
    match format {
        OutputFormat::Text => iris.iter().map(|i| format!("{}\n", i.as_str())).collect(),
        OutputFormat::Xml => {
            let items = entities_to_xml(&iris, QName::local(wrapper), QName::local(item));
            match items.first().and_then(|n| n.parent()) {
                Some(w) => serialize_node(&w, true),
                None => format!("<{wrapper}/>\n"),
            }
        }
    }
}

struct ReasonArgs<'a> {
    class: &'a Option<String>,
    superclass: &'a Option<String>,
    individual: &'a Option<String>,
    property: &'a Option<String>,
    object: &'a Option<String>,
    direct: bool,
}

fn cmd_reason(task: &str, r: &Reasoner, a: &ReasonArgs, format: OutputFormat) -> Outcome {
    let ont: &Ontology = r.ontology();
    let class = |flag: &Option<String>, name| -> Result<ClassExpr, Failure> {
        Ok(ClassExpr::named(ont.resolve_name(need(flag, name, task)?)))
    };
    let entity =
        |flag: &Option<String>, name| -> Result<Iri, Failure> { Ok(ont.resolve_name(need(flag, name, task)?)) };
    let flag = |b: bool| Ok(format!("{b}\n"));
    match task {
        "consistent" => flag(r.is_consistent()),
        "instances" => {
            let found = r.instances(&class(a.class, "class")?).map_err(eval_err)?;
            Ok(entity_output(found.into_iter().collect(), format, "instances", "instance"))
        }
        "subclasses" => {
            let found = r.subclasses(&class(a.class, "class")?, a.direct);
            Ok(entity_output(found.into_iter().collect(), format, "classes", "class"))
        }
        "values" => {
            let found = r
                .property_values(&entity(a.individual, "individual")?, &entity(a.property, "property")?)
                .map_err(eval_err)?;
            Ok(entity_output(found.into_iter().collect(), format, "values", "value"))
        }
        "instance-of" => {
            flag(r.is_instance_of(&entity(a.individual, "individual")?, &class(a.class, "class")?).map_err(eval_err)?)
        }
        "holds" => flag(
            r.holds(
                &entity(a.individual, "individual")?,
                &entity(a.property, "property")?,
                &entity(a.object, "object")?,
            )
            .map_err(eval_err)?,
        ),
        "subsumed" => flag(r.is_subsumed(&class(a.class, "class")?, &class(a.superclass, "superclass")?)),
        other => Err(usage(format!("unknown task `{other}`"))),
    }
}

fn cmd_check(data: &Path, ontology: Option<&Path>, output: Option<&Path>, profile: &str) -> Outcome {
    let profile: Profile = profile.parse().map_err(|e| usage(format!("{e}")))?;
    let text = read_input(data)?;
    let doc =
        parse_xml_with_uri(&text, Some(file_uri(data))).map_err(|e| eval_err(format!("{}: {e}", data.display())))?;
    let data_dir = absolute(data).parent().map(Path::to_path_buf).unwrap_or_default();
    let tbox = match ontology {
        Some(p) => absolute(p),
        None => data_dir.join("ontology_papers.owl"),
    };
    if !tbox.is_file() {
        return Err(usage(format!("{}: no such file", tbox.display())));
    }
    let env = Environment {
        base_dir: data_dir,
        context: Some(NodeRef::root_of(&doc)),
        external: vec![("tbox".into(), vec![Item::String(tbox.display().to_string())])],
        temp_files: false,
    };
    let program = parse_program(MAPPING).map_err(eval_err)?;
    let merged = match evaluate(&program, &env).map_err(eval_err)?.as_slice() {
        [Item::Node(n)] => n.clone(),
        _ => return Err(eval_err("mapping did not produce a document")),
    };

    // Write the merged ontology and read it back, as a separate run would.
    let temp;
    let target = match output {
        Some(p) => p.to_path_buf(),
        None => {
            temp = tempfile::tempdir().map_err(eval_err)?;
            temp.path().join("ontology_analysis.owl")
        }
    };
    fs::write(&target, serialize_node(&merged, true)).map_err(|e| eval_err(format!("{}: {e}", target.display())))?;
    let reread = parse_xml_with_uri(&read_input(&target)?, Some(file_uri(&target))).map_err(eval_err)?;
    let graph = parse_rdfxml_document(&NodeRef::root_of(&reread), &file_uri(&target)).map_err(eval_err)?;
    let ont = load_ontology(&graph).map_err(eval_err)?;
    let reasoner = Reasoner::new(Arc::new(ont), profile);

    let mut out = format!("consistent: {}\n", reasoner.is_consistent());
    for clash in reasoner.clashes() {
        out.push_str(&format!("clash {clash}\n"));
    }
    Ok(out)
}

fn dispatch(cli: Cli) -> Result<(String, Option<PathBuf>), Failure> {
    let fmt = |f: Option<Format>, default| match f {
        Some(Format::Xml) => OutputFormat::Xml,
        Some(Format::Text) => OutputFormat::Text,
        None => default,
    };
    match cli.command {
        Command::Run { program, data, output, format, temp_files } => {
            Ok((cmd_run(&program, &data, fmt(format, OutputFormat::Xml), temp_files)?, output))
        }
        Command::Query { query, data, output } => Ok((cmd_query(&query, &data)?, output)),
        Command::Reason {
            task,
            ontology,
            task_flag,
            ontology_flag,
            class,
            superclass,
            individual,
            property,
            object,
            direct,
            profile,
            output,
            format,
        } => {
            let task = match (task, task_flag) {
                (Some(t), None) | (None, Some(t)) => t,
                (None, None) => return Err(usage("reason needs a task")),
                (Some(_), Some(_)) => return Err(usage("give the task once")),
            };
            let ontology = match (ontology, ontology_flag) {
                (Some(o), None) | (None, Some(o)) => o,
                (None, None) => return Err(usage("reason needs an ontology")),
                (Some(_), Some(_)) => return Err(usage("give the ontology once")),
            };
            const TASKS: [&str; 7] =
                ["consistent", "instances", "subclasses", "values", "instance-of", "holds", "subsumed"];
            if !TASKS.contains(&task.as_str()) {
                return Err(usage(format!("unknown task `{task}`; expected one of {}", TASKS.join(", "))));
            }
            let reasoner = load_reasoner(&ontology, &profile)?;
            let args = ReasonArgs {
                class: &class,
                superclass: &superclass,
                individual: &individual,
                property: &property,
                object: &object,
                direct,
            };
            Ok((cmd_reason(&task, &reasoner, &args, fmt(format, OutputFormat::Text))?, output))
        }
        Command::Check { data, ontology, output, profile } => {
            Ok((cmd_check(&data, ontology.as_deref(), output.as_deref(), &profile)?, None))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok((text, None)) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Ok((text, Some(path))) => match fs::write(&path, text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("hyq: {}: {e}", path.display());
                ExitCode::from(1)
            }
        },
        Err(Failure::Usage(msg)) => {
            eprintln!("hyq: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Eval(msg)) => {
            eprintln!("hyq: {msg}");
            ExitCode::from(1)
        }
    }
}
