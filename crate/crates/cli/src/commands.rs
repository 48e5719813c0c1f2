use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;
use stancenet::hashtag_graph::Seeds;
use stancenet::ingest::{dedupe, lemma_filter, parse_corpus, write_jsonl, Corpus};
use stancenet::lexicon::Lexicon;
use stancenet::netmetrics::NetworkKind;
use stancenet::pipeline::{detect_stances, linguistic_report, network_report, LinguisticReport, NetworkReport};
use stancenet::propagation::{Stance, StanceAssignment};
use stancenet::report::{render_linguistic_table, render_network_table, write_linguistic_csv, write_network_csv};
use stancenet::synth::{generate, SynthParams};
use stancenet::Error;

use crate::config::PipelineConfig;
use crate::output::Outputs;
use crate::{Overrides, SynthArgs};

const LINGUISTIC_FILES: [&str; 3] = ["linguistic.csv", "linguistic.json", "linguistic.txt"];
const TOP_COOCCURRING: usize = 10;

fn load_corpus(paths: &[PathBuf]) -> Result<Corpus> {
    let mut tweets = Vec::new();
    for path in paths {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let corpus = parse_corpus(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
        tweets.extend(corpus.into_tweets());
    }
    Corpus::from_records(tweets).context("combining input files")
}

fn load_seeds(path: &Path) -> Result<Seeds> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Seeds::parse(BufReader::new(file)).with_context(|| format!("reading seeds {}", path.display()))
}

fn load_lexicon(path: Option<&Path>) -> Result<Lexicon> {
    match path {
        None => Ok(Lexicon::default_lexicon()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Lexicon::from_config(&text).with_context(|| format!("loading lexicons {}", p.display()))
        }
    }
}

fn users_line(n: usize) -> String {
    format!("{n} user{}", if n == 1 { "" } else { "s" })
}

fn corpus_line(label: &str, corpus: &Corpus) -> String {
    format!("{label}: {} tweets from {}\n", corpus.len(), users_line(corpus.users().len()))
}

fn finish(outputs: Outputs, dir: &Path) -> Result<()> {
    for path in outputs.commit(dir)? {
        info!("wrote {}", path.display());
    }
    Ok(())
}

pub fn ingest(overrides: &Overrides) -> Result<()> {
    let config = PipelineConfig::resolve(overrides)?;
    config.require_input()?;
    let corpus = load_corpus(&config.input)?;
    let filtered = lemma_filter(&corpus, &config.lemmas);
    let deduped = dedupe(&filtered);

    let mut summary = corpus_line("parsed", &corpus);
    summary += &corpus_line(&format!("on topic ({})", config.lemmas.join(", ")), &filtered);
    summary += &corpus_line("distinct texts", &deduped);

    let mut outputs = Outputs::default();
    outputs.add_with("corpus.jsonl", |w| write_jsonl(&filtered, w))?;
    outputs.add_with("corpus.dedup.jsonl", |w| write_jsonl(&deduped, w))?;
    outputs.add("ingest_summary.txt", summary.clone().into_bytes());
    finish(outputs, &config.out)?;
    print!("{summary}");
    Ok(())
}

fn group_lines(corpus: &Corpus, stances: &StanceAssignment) -> String {
    let mut out = String::new();
    for stance in [Stance::Pro, Stance::Anti, Stance::Unlabeled] {
        let users = stances.count(stance);
        let tweets = corpus.tweets().iter().filter(|t| stances.label(&t.user_id) == stance).count();
        let _ = writeln!(out, "{} {stance} users with {tweets} tweets", users);
    }
    out
}

pub fn stance(overrides: &Overrides) -> Result<()> {
    let config = PipelineConfig::resolve(overrides)?;
    config.require_input()?;
    let seeds = load_seeds(config.require_seeds()?)?;
    let corpus = lemma_filter(&load_corpus(&config.input)?, &config.lemmas);
    let outcome = detect_stances(&corpus, &seeds, &config.propagation())?;

    let run = &outcome.propagation;
    let mut summary = format!(
        "propagation: gamma {}, {} sweeps, final slack {}, {} of {} hashtags valenced\n",
        run.state.gamma(),
        run.state.pass() + 1,
        run.state.slack(),
        run.graph.valences().len(),
        run.graph.node_count()
    );
    if !outcome.missing_seeds.is_empty() {
        let _ = writeln!(summary, "seeds not in the corpus: {}", outcome.missing_seeds.join(", "));
    }
    summary += &group_lines(&corpus, &outcome.stances);
    summary += "\ntop co-occurring hashtags per seed:\n";
    for (tag, valence) in seeds.iter() {
        let top = outcome.seeded.top_cooccurring(tag, TOP_COOCCURRING)?;
        let listed: Vec<String> = top.iter().map(|(t, w)| format!("#{t} ({w})")).collect();
        let _ = writeln!(summary, "#{tag} ({valence:+}): {}", listed.join(", "));
    }

    let mut outputs = Outputs::default();
    outputs.add_with("valences.csv", |w| run.graph.write_valences_csv(w))?;
    outputs.add_with("stances.csv", |w| outcome.stances.write_csv(w))?;
    outputs.add_with("hashtag_edges.csv", |w| outcome.seeded.write_edges_csv(w))?;
    outputs.add("stance_summary.txt", summary.clone().into_bytes());
    finish(outputs, &config.out)?;
    print!("{summary}");
    Ok(())
}

pub fn analyze(overrides: &Overrides) -> Result<()> {
    let config = PipelineConfig::resolve(overrides)?;
    config.require_input()?;
    let seeds = load_seeds(config.require_seeds()?)?;
    let lexicon = load_lexicon(config.lexicons.as_deref())?;
    let filtered = lemma_filter(&load_corpus(&config.input)?, &config.lemmas);
    let deduped = dedupe(&filtered);
    let outcome = detect_stances(&filtered, &seeds, &config.propagation())?;
    let stances = &outcome.stances;

    let text_corpus = if config.raw_denominators { &filtered } else { &deduped };
    let linguistic = match linguistic_report(text_corpus, stances, &lexicon, &config.stats()) {
        Ok(report) => Some(report),
        Err(Error::Stats(why)) => {
            eprintln!("skipping the linguistic report: {why}");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let net_corpus = if config.dedup_for_networks { &deduped } else { &filtered };
    let (networks, net_report) = network_report(net_corpus, stances);

    let mut outputs = Outputs::default();
    let mut printed = group_lines(&filtered, stances);
    if let Some(report) = &linguistic {
        let table = render_linguistic_table(report);
        outputs.add_with("linguistic.csv", |w| write_linguistic_csv(report, w))?;
        outputs.add("linguistic.json", to_json(report)?);
        outputs.add("linguistic.txt", table.clone().into_bytes());
        printed += "\n";
        printed += &table;
    }
    let table = render_network_table(&net_report);
    outputs.add_with("network.csv", |w| write_network_csv(&net_report, w))?;
    outputs.add("network.json", to_json(&net_report)?);
    outputs.add("network.txt", table.clone().into_bytes());
    for net in networks.iter() {
        outputs.add_with(&format!("edges_{}.csv", net.kind()), |w| net.write_edges_csv(w))?;
    }
    outputs.add_with("stances.csv", |w| stances.write_csv(w))?;
    finish(outputs, &config.out)?;
    if linguistic.is_none() {
        // A stale report from an earlier run would no longer match.
        for name in LINGUISTIC_FILES {
            let _ = fs::remove_file(config.out.join(name));
        }
    }
    printed += "\n";
    printed += &table;
    print!("{printed}");
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn report(overrides: &Overrides) -> Result<()> {
    let config = PipelineConfig::resolve(overrides)?;
    let linguistic = config.out.join("linguistic.json");
    let network = config.out.join("network.json");
    if !linguistic.is_file() && !network.is_file() {
        bail!("no reports in {}; run `analyze` first", config.out.display());
    }
    let mut out = String::new();
    if linguistic.is_file() {
        out += &render_linguistic_table(&read_json::<LinguisticReport>(&linguistic)?);
        out += "\n";
    }
    if network.is_file() {
        out += &render_network_table(&read_json::<NetworkReport>(&network)?);
    }
    print!("{out}");
    Ok(())
}

fn load_params(path: &Path) -> Result<SynthParams> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let params = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
    } else {
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
    };
    Ok(params)
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let params = load_params(&args.params)?;
    let out = generate(&params)?;

    let mut seeds = String::from("# hashtag,valence\n");
    for (tag, valence) in params.seeds().iter() {
        let _ = writeln!(seeds, "{tag},{valence}");
    }
    let pipeline = PipelineConfig {
        input: vec!["corpus.jsonl".into()],
        seeds: Some("seeds.txt".into()),
        out: "results".into(),
        ..PipelineConfig::default()
    };

    let mut outputs = Outputs::default();
    outputs.add_with("corpus.jsonl", |w| write_jsonl(&out.corpus, w))?;
    outputs.add("truth.json", to_json(&out.truth)?);
    outputs.add("seeds.txt", seeds.into_bytes());
    outputs.add("pipeline.toml", toml::to_string(&pipeline)?.into_bytes());
    finish(outputs, &args.out)?;
    let planted: Vec<String> = NetworkKind::ALL
        .iter()
        .filter_map(|k| out.truth.edges.get(k).map(|e| format!("{} {k} edges", e.len())))
        .collect();
    println!(
        "{} tweets from {} users{}{}",
        out.corpus.len(),
        out.truth.users.len(),
        if planted.is_empty() { "" } else { ", " },
        planted.join(", ")
    );
    Ok(())
}
