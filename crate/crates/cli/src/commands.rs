use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use bapkit_core::actions::{net_actions, resolve_tokens};
use bapkit_core::dataset::{
    extract_items, parse_action_block, read_jsonl, render_prompt, split_by_target, write_jsonl, BapItem,
    GameLogRecord, Prediction, PromptVariant, Split, SplitName, SplitSpec,
};
use bapkit_core::metrics::{score_item, BoardKind, EvalItem, ItemScores, Metric, ScoreReport};
use bapkit_core::simulator::{game_rng, generate_game, SimConfig};

use crate::{GenerateArgs, RenderArgs, ScoreArgs, SplitArgs, SplitOptions, StatsArgs, UsageError};

/// Games simulated per batch when generating up to an item count.
const BATCH: usize = 256;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn load_config(path: Option<&Path>) -> Result<SimConfig> {
    let cfg = match path {
        None => SimConfig::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn split_spec(o: &SplitOptions) -> Result<SplitSpec> {
    let ratios: [f64; 3] = o
        .split_ratios
        .clone()
        .try_into()
        .map_err(|_| usage("--split-ratios takes three numbers"))?;
    if ratios.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Err(usage(format!("split ratios must be positive, got {ratios:?}")));
    }
    Ok(SplitSpec { ratios, seed: o.split_seed })
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

fn read_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_jsonl(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn write_file<T: Serialize>(path: &Path, values: &[T]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    write_jsonl(&mut w, values)?;
    w.flush()?;
    Ok(())
}

pub fn generate(a: &GenerateArgs) -> Result<()> {
    let cfg = load_config(a.config.as_deref())?;
    let spec = a.split_dir.as_ref().map(|_| split_spec(&a.split)).transpose()?;
    let pool = pool(a.jobs)?;
    let make = |i: usize| -> Result<GameLogRecord> {
        let mut rng = game_rng(a.seed, i as u64);
        let mut game = generate_game(&mut rng, a.kind.simulator(), &cfg).with_context(|| format!("game {i}"))?;
        game.id = format!("{}-{i:06}", a.kind.slug());
        Ok(GameLogRecord::from_game(&game)?)
    };
    let logs: Vec<GameLogRecord> = match a.target_items {
        None => pool.install(|| (0..a.count).into_par_iter().map(make).collect::<Result<_>>())?,
        Some(target) => {
            let mut logs = Vec::new();
            let mut items = 0;
            while items < target {
                let start = logs.len();
                let batch: Vec<GameLogRecord> =
                    pool.install(|| (start..start + BATCH).into_par_iter().map(make).collect::<Result<_>>())?;
                for log in batch {
                    if items >= target {
                        break;
                    }
                    items += log.item_count();
                    logs.push(log);
                }
            }
            logs
        }
    };
    write_file(&a.out, &logs)?;

    let turns: usize = logs.iter().map(|l| l.turns.len()).sum();
    let items: usize = logs.iter().map(|l| l.item_count()).sum();
    let mut lines: BTreeMap<&str, usize> = BTreeMap::new();
    for t in logs.iter().flat_map(|l| &l.turns) {
        for line in &t.actions {
            *lines.entry(line.split_whitespace().next().unwrap_or("")).or_default() += 1;
        }
    }
    println!("games {}  turns {turns}  items {items}", logs.len());
    for (verb, n) in &lines {
        println!("  {verb:<6} {n}");
    }
    if let (Some(dir), Some(spec)) = (&a.split_dir, spec) {
        write_split(dir, split_by_target(logs, &spec)?)?;
    }
    Ok(())
}

fn write_split(dir: &Path, split: Split) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for name in SplitName::ALL {
        let part = split.part(name);
        write_file(&dir.join(format!("{}.jsonl", name.label())), part)?;
        let items: usize = part.iter().map(|l| l.item_count()).sum();
        println!("{:<6} logs {:>6}  items {:>7}", name.label(), part.len(), items);
    }
    write_file(&dir.join("manifest.jsonl"), &split.manifest)
}

pub fn split(a: &SplitArgs) -> Result<()> {
    let spec = split_spec(&a.split)?;
    let logs: Vec<GameLogRecord> = read_file(&a.logs)?;
    write_split(&a.out_dir, split_by_target(logs, &spec)?)
}

#[derive(Serialize, Deserialize)]
struct PromptRecord {
    id: String,
    variant: PromptVariant,
    prompt: String,
    target: String,
}

pub fn render(a: &RenderArgs) -> Result<()> {
    let logs: Vec<GameLogRecord> = read_file(&a.logs)?;
    let mut items = Vec::new();
    for log in &logs {
        items.extend(extract_items(log)?);
    }
    let prompts: Vec<PromptRecord> = items
        .iter()
        .map(|it| PromptRecord {
            id: it.id.clone(),
            variant: a.variant,
            prompt: render_prompt(it, a.variant),
            target: it.target_text(),
        })
        .collect();
    write_file(&a.out, &prompts)?;
    if let Some(path) = &a.items {
        write_file(path, &items)?;
    }
    println!("logs {}  items {}", logs.len(), items.len());
    Ok(())
}

fn item_line(id: &str, s: &ItemScores) -> String {
    let mut line = format!("{id} {}", s.board.label());
    for m in Metric::ALL {
        line.push_str(&format!(" {}={:.4}", m.label().to_lowercase(), s.get(m).f1()));
    }
    line
}

pub fn score(a: &ScoreArgs) -> Result<()> {
    let refs: Vec<BapItem> = read_file(&a.references)?;
    let preds: Vec<Prediction> = read_file(&a.predictions)?;
    let mut problems: Vec<String> = Vec::new();
    let mut by_id: HashMap<&str, &Prediction> = HashMap::new();
    for p in &preds {
        if by_id.insert(&p.id, p).is_some() {
            problems.push(format!("duplicate prediction id {}", p.id));
        }
    }
    let known: HashMap<&str, ()> = refs.iter().map(|r| (r.id.as_str(), ())).collect();
    for p in &preds {
        if !known.contains_key(p.id.as_str()) {
            problems.push(format!("prediction {} matches no reference item", p.id));
        }
    }

    let mut units = Vec::with_capacity(refs.len());
    for r in &refs {
        let (ref_tokens, ref_errors) = parse_action_block(&r.target_text());
        if let Some(e) = ref_errors.first() {
            bail!("reference {}: {e}", r.id);
        }
        let output = match by_id.get(r.id.as_str()) {
            Some(p) => p.output.as_str(),
            None => {
                problems.push(format!("reference {} has no prediction", r.id));
                ""
            }
        };
        let (pred_tokens, pred_errors) = parse_action_block(output);
        problems.extend(pred_errors.iter().map(|e| format!("prediction {}: {e}", r.id)));
        units.push((r, ref_tokens, pred_tokens));
    }
    if !problems.is_empty() {
        for p in &problems {
            eprintln!("{p}");
        }
        if !a.lenient {
            bail!("{} problem(s) in the predictions; rerun with --lenient to score anyway", problems.len());
        }
    }

    let scores: Vec<ItemScores> = pool(a.jobs)?.install(|| {
        units
            .par_iter()
            .map(|(r, ref_tokens, pred_tokens)| -> Result<ItemScores> {
                let (reference, _) = resolve_tokens(&r.before, ref_tokens)?;
                let (predicted, _) = resolve_tokens(&r.before, pred_tokens)?;
                let item = EvalItem::new(r.before.clone(), reference, predicted, r.multi_interp);
                score_item(&item).with_context(|| format!("scoring {}", r.id))
            })
            .collect::<Result<_>>()
    })?;
    let report = ScoreReport::from_scores(&scores)?;
    print!("{report}");
    if let Some(path) = &a.report {
        let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        write!(w, "{report}")?;
        writeln!(w)?;
        for ((r, _, _), s) in units.iter().zip(&scores) {
            writeln!(w, "{}", item_line(&r.id, s))?;
        }
        w.flush()?;
    }
    Ok(())
}

fn log_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut out: Vec<PathBuf> = std::fs::read_dir(path)
        .with_context(|| format!("reading {}", path.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl") && p.file_stem().is_some_and(|s| s != "manifest"))
        .collect();
    out.sort();
    Ok(out)
}

#[derive(Default)]
struct Tally {
    logs: usize,
    lengths: Vec<usize>,
    eb: usize,
}

impl Tally {
    fn row(&self, name: &str) -> String {
        let n = self.lengths.len();
        let mean = if n == 0 { 0.0 } else { self.lengths.iter().sum::<usize>() as f64 / n as f64 };
        let var = if n == 0 {
            0.0
        } else {
            self.lengths.iter().map(|l| (*l as f64 - mean).powi(2)).sum::<f64>() / n as f64
        };
        format!(
            "{name:<16}{:>7}{:>8}{:>7}{:>7}{:>10.2}{:>10.2}",
            self.logs,
            n,
            self.eb,
            n - self.eb,
            mean,
            var.sqrt()
        )
    }
}

pub fn stats(a: &StatsArgs) -> Result<()> {
    let files = log_files(&a.logs)?;
    let mut total = Tally::default();
    let mut rows = Vec::new();
    let mut relations: BTreeMap<String, usize> = BTreeMap::new();
    for f in &files {
        let logs: Vec<GameLogRecord> = read_file(f)?;
        let mut tally = Tally { logs: logs.len(), ..Tally::default() };
        for log in &logs {
            for (t, (before, actions)) in log.turns.iter().zip(log.replay()?) {
                if actions.is_empty() {
                    continue;
                }
                tally.lengths.push(net_actions(&before, &actions)?.len());
                tally.eb += (BoardKind::of(&before) == BoardKind::Empty) as usize;
                if let Some(r) = &t.relation {
                    *relations.entry(r.clone()).or_default() += 1;
                }
            }
        }
        total.logs += tally.logs;
        total.eb += tally.eb;
        total.lengths.extend(&tally.lengths);
        let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        rows.push(tally.row(&name));
    }
    if total.logs == 0 {
        bail!("no logs found in {}", a.logs.display());
    }
    println!("{:<16}{:>7}{:>8}{:>7}{:>7}{:>10}{:>10}", "file", "logs", "items", "EB", "NEB", "mean_len", "std_len");
    for r in rows {
        println!("{r}");
    }
    if files.len() > 1 {
        println!("{}", total.row("all"));
    }
    if !relations.is_empty() {
        println!("relations:");
        for (r, n) in relations {
            println!("  {r:<24}{n:>8}");
        }
    }
    Ok(())
}
