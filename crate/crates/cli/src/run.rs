use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use comove::append::{combine_fcis, should_update, FciSet};
use comove::clustering::{build_cluster_matrix_of_kind, parse_pre_clustered, write_pre_clustered, DbscanParams};
use comove::extract::{extract_patterns, write_patterns_csv, write_patterns_geojson, ExtractionContext};
use comove::gen::{gen_synthetic, SyntheticSpec};
use comove::incremental::{mine, write_block_report};
use comove::ingest::{interpolate, parse_trajectories, periodic_decompose, write_trajectories, Point, TrajectoryDb};
use comove::model::{
    ClusterId, ClusterMatrix, Column, Labels, MatrixKind, MiningParams, Mode, Pattern, PatternKind, Tidset,
};
use comove::store::{read_store, write_store, FciStore};
use comove::Error;
use serde_json::json;

use crate::{
    AppendArgs, Cli, ClusteringArgs, Command, ConvertArgs, Emit, GenArgs, MineArgs, ModeArg, PatternArgs, Target,
};

pub const PATTERNS_CSV: &str = "patterns.csv";
pub const PATTERNS_GEOJSON: &str = "patterns.geojson";
pub const STORE: &str = "fcis.tsv";
pub const CLUSTERS: &str = "clusters.tsv";
pub const TRAJECTORIES: &str = "trajectories.csv";
pub const BLOCKS: &str = "blocks.txt";

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn data(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Param(_)) { 1 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

trait Context<T> {
    fn at(self, path: &Path) -> Outcome<T>;
}

impl<T> Context<T> for comove::Result<T> {
    fn at(self, path: &Path) -> Outcome<T> {
        self.map_err(|e| {
            let mut f = Failure::from(e);
            f.message = format!("{}: {}", path.display(), f.message);
            f
        })
    }
}

impl<T> Context<T> for std::io::Result<T> {
    fn at(self, path: &Path) -> Outcome<T> {
        self.map_err(|e| Failure::data(format!("{}: {e}", path.display())))
    }
}

pub fn run(cli: Cli) -> Outcome<()> {
    let threads = match cli.threads {
        Some(0) => return Err(Failure::usage("--threads must be >= 1")),
        Some(n) => n,
        None => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::data(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Mine(a) => mine_cmd(a),
        Command::Append(a) => append_cmd(a),
        Command::Gen(a) => gen_cmd(a),
        Command::Convert(a) => convert_cmd(a),
    })
}

fn open(path: &Path) -> Outcome<BufReader<File>> {
    File::open(path).map(BufReader::new).at(path)
}

fn create(path: &Path) -> Outcome<BufWriter<File>> {
    File::create(path).map(BufWriter::new).at(path)
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> comove::Result<()>) -> Outcome<()> {
    let mut out = create(path)?;
    f(&mut out).at(path)?;
    out.flush().at(path)
}

fn dbscan(args: &ClusteringArgs) -> Outcome<DbscanParams> {
    DbscanParams::new(args.eps, args.minpts).map_err(|e| Failure::usage(format!("--eps/--minpts: {e}")))
}

fn params(p: &PatternArgs, epsilon: usize) -> MiningParams {
    MiningParams { epsilon, min_t: p.min_t, theta: p.theta, min_c: p.min_c, min_wei: p.min_wei, ..Default::default() }
}

/// Input as a cluster matrix plus the database its positions come from.
struct Loaded {
    matrix: ClusterMatrix,
    labels: Labels,
    db: TrajectoryDb,
}

fn load(input: &Path, clustering: &ClusteringArgs, period: Option<u32>) -> Outcome<Loaded> {
    if clustering.pre_clustered {
        let kind = if period.is_some() { MatrixKind::Periodic } else { MatrixKind::PerTimestamp };
        let (matrix, labels) = parse_pre_clustered(open(input)?, kind).at(input)?;
        return Ok(Loaded { matrix, labels, db: TrajectoryDb::empty() });
    }
    let dbscan = dbscan(clustering)?;
    let db = interpolate(&parse_trajectories(open(input)?).at(input)?);
    let (db, kind) = match period {
        Some(p) => {
            (periodic_decompose(&db, p).map_err(|e| Failure::usage(format!("--period: {e}")))?.1, MatrixKind::Periodic)
        }
        None => (db, MatrixKind::PerTimestamp),
    };
    let matrix = build_cluster_matrix_of_kind(&db, dbscan, kind)?;
    Ok(Loaded { matrix, labels: db.labels().clone(), db })
}

fn write_patterns(dir: &Path, emit: Emit, patterns: &[Pattern], loaded: &Loaded) -> Outcome<()> {
    if matches!(emit, Emit::Csv | Emit::Both) {
        write_file(&dir.join(PATTERNS_CSV), |o| write_patterns_csv(patterns, &loaded.matrix, &loaded.labels, o))?;
    }
    if matches!(emit, Emit::Geojson | Emit::Both) {
        write_file(&dir.join(PATTERNS_GEOJSON), |o| {
            write_patterns_geojson(patterns, &loaded.matrix, &loaded.labels, &loaded.db, o)
        })?;
    }
    Ok(())
}

fn write_outputs(
    dir: &Path,
    emit: Emit,
    epsilon: usize,
    fcis: Vec<comove::model::Fci>,
    patterns: &[Pattern],
    loaded: &Loaded,
) -> Outcome<()> {
    write_patterns(dir, emit, patterns, loaded)?;
    let store = FciStore { epsilon, kind: loaded.matrix.kind(), labels: loaded.labels.clone(), fcis };
    write_file(&dir.join(STORE), |o| write_store(&store, o))?;
    write_file(&dir.join(CLUSTERS), |o| write_pre_clustered(&loaded.matrix, &loaded.labels, o))?;
    if loaded.db.n_objects() > 0 {
        write_file(&dir.join(TRAJECTORIES), |o| write_trajectories(&loaded.db, o))?;
    }
    Ok(())
}

fn summary(command: &str, mode: &str, n_fcis: usize, patterns: &[Pattern], started: Instant) {
    let mut doc = json!({ "command": command, "mode": mode, "fcis": n_fcis, "patterns": patterns.len() });
    for kind in PatternKind::ALL {
        doc[kind.as_str()] = json!(patterns.iter().filter(|p| p.kind() == kind).count());
    }
    doc["wall_ms"] = json!(started.elapsed().as_millis() as u64);
    eprintln!("{doc}");
}

fn mine_cmd(a: MineArgs) -> Outcome<()> {
    let started = Instant::now();
    let mode = match a.mode {
        ModeArg::Monolithic => Mode::Monolithic,
        ModeArg::Incremental => Mode::Incremental,
        ModeArg::Nested => Mode::Nested,
    };
    let epsilon = a.patterns.epsilon.unwrap_or(2);
    let p = MiningParams { block_size: a.block_size, mode, ..params(&a.patterns, epsilon) };
    p.validate()?;
    let loaded = load(&a.input, &a.clustering, a.period)?;
    fs::create_dir_all(&a.output).at(&a.output)?;
    let out = mine(&loaded.matrix, p)?;
    let n_fcis = out.fcis.len();
    write_outputs(&a.output, a.patterns.emit, epsilon, out.fcis, &out.patterns, &loaded)?;
    if mode != Mode::Monolithic {
        write_file(&a.output.join(BLOCKS), |o| write_block_report(&out.blocks, &loaded.labels, o))?;
    }
    summary("mine", mode.as_str(), n_fcis, &out.patterns, started);
    Ok(())
}

/// Re-expresses `matrix` over the object universe of `target`.
fn remap_objects(matrix: &ClusterMatrix, from: &Labels, target: &Labels, input: &Path) -> Outcome<ClusterMatrix> {
    let mut map = Vec::with_capacity(from.objects.len());
    for name in &from.objects {
        match target.object_index(name) {
            Some(o) => map.push(o.0),
            None => {
                return Err(Failure::data(format!(
                    "{}: object universe mismatch: object `{name}` is not in the store",
                    input.display()
                )))
            }
        }
    }
    let n = target.objects.len() as u32;
    let cols = matrix
        .columns()
        .iter()
        .map(|c| Column::new(c.id, Tidset::from_ids(n, c.tidset.ids().map(|o| map[o.0 as usize]))))
        .collect();
    Ok(ClusterMatrix::new(matrix.kind(), n, matrix.n_units(), cols)?)
}

fn concat_matrices(a: &ClusterMatrix, b: &ClusterMatrix) -> Outcome<ClusterMatrix> {
    let mut cols = a.columns().to_vec();
    cols.extend(
        b.columns()
            .iter()
            .map(|c| Column::new(ClusterId::new(c.id.time.0 + a.n_units(), c.id.ordinal), c.tidset.clone())),
    );
    Ok(ClusterMatrix::new(a.kind(), a.n_objects(), a.n_units() + b.n_units(), cols)?)
}

/// Tracks of `db` over the objects and timestamps of `labels`, matched by
/// label. Missing objects or timestamps read as unobserved.
fn align(db: &TrajectoryDb, labels: &Labels) -> Vec<Vec<Option<Point>>> {
    labels
        .objects
        .iter()
        .map(|name| {
            let track = db.labels().object_index(name).map(|o| db.track(o));
            labels
                .times
                .iter()
                .map(|&t| {
                    let ti = db.labels().time_index(t)?;
                    track?.get(ti.0 as usize).copied().flatten()
                })
                .collect()
        })
        .collect()
}

fn append_cmd(a: AppendArgs) -> Outcome<()> {
    let started = Instant::now();
    let store_path = a.store.join(STORE);
    let store = read_store(open(&store_path)?).at(&store_path)?;
    if store.kind != MatrixKind::PerTimestamp {
        return Err(Failure::data(format!(
            "{}: cannot append to a store of kind `{}`",
            store_path.display(),
            store.kind.as_str()
        )));
    }
    let epsilon = match a.patterns.epsilon {
        Some(e) if e != store.epsilon => {
            return Err(Failure::data(format!(
                "--epsilon {e} does not match the store's epsilon {} ({})",
                store.epsilon,
                store_path.display()
            )))
        }
        _ => store.epsilon,
    };
    let p = params(&a.patterns, epsilon);
    p.validate()?;

    let clusters_path = a.store.join(CLUSTERS);
    let (old_matrix, old_labels) = parse_pre_clustered(open(&clusters_path)?, store.kind).at(&clusters_path)?;
    if old_labels != store.labels {
        return Err(Failure::data(format!("{}: labels differ from {}", clusters_path.display(), store_path.display())));
    }
    let new = load(&a.input, &a.clustering, None)?;
    if let (Some(&last), Some(&first)) = (old_labels.times.last(), new.labels.times.first()) {
        if first <= last {
            return Err(Failure::data(format!(
                "{}: time range: new data starts at {first}, not after the store's last time {last}",
                a.input.display()
            )));
        }
    }
    let incoming_matrix = remap_objects(&new.matrix, &new.labels, &old_labels, &a.input)?;
    let n = old_labels.objects.len() as u32;
    let existing = FciSet { n_objects: n, offset: 0, n_units: old_matrix.n_units(), fcis: store.fcis };
    let incoming = FciSet {
        n_objects: n,
        offset: old_matrix.n_units(),
        n_units: incoming_matrix.n_units(),
        fcis: comove::miner::mine_fci(&incoming_matrix, epsilon)?,
    };
    if !should_update(existing.n_units as u64, incoming.n_units as u64) {
        eprintln!(
            "note: {} new timestamps against {} stored is over 15 percent; re-mining from scratch may be faster",
            incoming.n_units, existing.n_units
        );
    }
    let (combined, stats) = combine_fcis(&existing, &incoming, epsilon)?;

    let matrix = concat_matrices(&old_matrix, &incoming_matrix)?;
    let mut labels = old_labels.clone();
    labels.times.extend_from_slice(&new.labels.times);
    let traj_path = a.store.join(TRAJECTORIES);
    let db = if traj_path.exists() && new.db.n_objects() > 0 {
        let old_db = parse_trajectories(open(&traj_path)?).at(&traj_path)?;
        let tracks = align(&old_db, &old_labels)
            .into_iter()
            .zip(align(&new.db, &Labels { objects: old_labels.objects.clone(), times: new.labels.times.clone() }))
            .map(|(mut a, b)| {
                a.extend(b);
                a
            })
            .collect();
        TrajectoryDb::new(labels.clone(), tracks)?
    } else {
        TrajectoryDb::empty()
    };
    let ctx = ExtractionContext::new(&matrix, p)?;
    let patterns = extract_patterns(&combined.fcis, &ctx)?;
    let n_fcis = combined.fcis.len();
    let loaded = Loaded { matrix, labels, db };
    write_outputs(&a.store, a.patterns.emit, epsilon, combined.fcis, &patterns, &loaded)?;
    let blocks = a.store.join(BLOCKS);
    if blocks.exists() {
        fs::remove_file(&blocks).at(&blocks)?;
    }
    eprintln!("{}", json!({ "pairs_evaluated": stats.pairs_evaluated, "lookup_probes": stats.lookup_probes }));
    summary("append", "append", n_fcis, &patterns, started);
    Ok(())
}

fn gen_cmd(a: GenArgs) -> Outcome<()> {
    let spec = SyntheticSpec {
        n_objects: a.objects,
        n_times: a.times,
        n_groups: a.groups,
        switch_prob: a.switch_prob,
        spread: a.spread,
        seed: a.seed,
        ..SyntheticSpec::default()
    };
    let db = gen_synthetic(&spec)?;
    write_file(&a.output, |o| write_trajectories(&db, o))
}

fn convert_cmd(a: ConvertArgs) -> Outcome<()> {
    match a.to {
        Target::Clusters => {
            let loaded = load(&a.input, &a.clustering, None)?;
            write_file(&a.output, |o| write_pre_clustered(&loaded.matrix, &loaded.labels, o))
        }
        Target::Trajectories => {
            if a.clustering.pre_clustered {
                return Err(Failure::usage("--to trajectories needs trajectory input, not --pre-clustered"));
            }
            let mut db = parse_trajectories(open(&a.input)?).at(&a.input)?;
            if a.interpolate {
                db = interpolate(&db);
            }
            write_file(&a.output, |o| write_trajectories(&db, o))
        }
    }
}
