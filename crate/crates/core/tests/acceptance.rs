//! End-to-end acceptance suite. Runs every criterion, prints one line each and
//! exits non-zero if any of them fails.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crackgen_core::embed::{embed_crack, synthetic_background, GrayStats};
use crackgen_core::graph_paths::{boundary_cycle, dijkstra, spp_as_ip};
use crackgen_core::ip_solver::{solve_binary, solve_lp, SolveOptions};
use crackgen_core::minsurf::{min_weight_surface, surface_boundary};
use crackgen_core::pipeline::{
    run_geometry, run_pipeline, write_outputs, AirStats, Background, BranchConfig, EmbeddingConfig, MicrostructureConfig,
    PipelineConfig, Weights,
};
use crackgen_core::raster::{
    adaptive_dilate, apply_microstructure_with, dilation_walk, median_filter_binary, rasterize_labels, rasterize_surface,
    surface_pairs, DilationSpec,
};
use crackgen_core::voronoi::{assign_weights, build_bounded_voronoi, extract_complex, ArcWeight, FacetWeight};
use crackgen_core::{BinaryVolume, Cuboid, DVec3, PointModel, PointPattern};

use common::*;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn spp_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst_dev: f64 = 0.0;
    for g in 0..100 {
        let n = rng.random_range(2..=50);
        let k = random_connected_graph(&mut rng, n);
        let s = rng.random_range(0..n);
        let t = loop {
            let t = rng.random_range(0..n);
            if t != s {
                break t;
            }
        };
        let path = dijkstra(&k, s, t, |_| true).map_err(|e| format!("graph {g}: {e}"))?;
        let (prog, _) = spp_as_ip(&k, s, t, |_| true);
        let ip = solve_binary(&prog, &SolveOptions::default()).map_err(|e| format!("graph {g}: {e}"))?;
        check(ip.objective == path.weight, || format!("graph {g}: dijkstra {} vs ip {}", path.weight, ip.objective))?;
        let bf = bellman_ford(&k, s, t);
        check(bf == Some(path.weight), || format!("graph {g}: bellman-ford {bf:?} vs dijkstra {}", path.weight))?;
        let lp = solve_lp(&prog).map_err(|e| format!("graph {g}: lp {e}"))?;
        let dev = lp.values.iter().map(|v| (v - v.round()).abs()).fold(0.0, f64::max);
        worst_dev = worst_dev.max(dev);
        check(dev < 1e-7, || format!("graph {g}: fractional LP value, deviation {dev}"))?;
        check((lp.objective - path.weight).abs() < 1e-9, || format!("graph {g}: lp objective {}", lp.objective))?;
    }
    let el = start.elapsed();
    check(el < Duration::from_secs(30), || format!("took {}", secs(el)))?;
    Ok(format!("100 graphs, max LP fractional deviation {worst_dev:.1e}, {}", secs(el)))
}

fn msp_brute_force_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let q = Cuboid::unit();
    let (mut done, mut full, mut max_vars, mut min_vars) = (0, 0, 0, usize::MAX);
    let mut attempts = 0;
    while done < 200 {
        attempts += 1;
        check(attempts < 2000, || "too many rejected instances".into())?;
        let n = rng.random_range(2..=5);
        let pts: Vec<DVec3> = (0..n).map(|_| DVec3::new(rng.random(), rng.random(), rng.random())).collect();
        let Ok(cells) = build_bounded_voronoi(&PointPattern::explicit(pts, q), &q) else { continue };
        let k = extract_complex(&cells, 1e-9 * q.diameter()).map_err(|e| e.to_string())?;
        let mut k = assign_weights(k, ArcWeight::Unit, FacetWeight::Unit).map_err(|e| e.to_string())?;
        for f in &mut k.facets {
            f.weight = f64::from(rng.random_range(1..=9u32));
        }
        let heights = [rng.random(), rng.random(), rng.random(), rng.random()];
        let Ok(h) = boundary_cycle(&k, &q, heights) else { continue };
        let demand = dense_chain(k.arcs.len(), &h.chain());
        let s = min_weight_surface(&k, &h).map_err(|e| format!("instance {done}: {e}"))?;
        let bf = msp_brute_force(&k, &demand);
        check(bf == Some(s.weight), || format!("instance {done} ({n} generators): ip {} vs enumeration {bf:?}", s.weight))?;
        if 2 * k.facets.len() <= 22 {
            let plain = msp_brute_force_full(&k, &demand);
            check(plain == Some(s.weight), || format!("instance {done}: ip {} vs full enumeration {plain:?}", s.weight))?;
            full += 1;
        }
        max_vars = max_vars.max(2 * k.facets.len());
        min_vars = min_vars.min(2 * k.facets.len());
        done += 1;
    }
    let el = start.elapsed();
    check(el < Duration::from_secs(300), || format!("took {}", secs(el)))?;
    Ok(format!(
        "200 complexes ({min_vars}..{max_vars} variables; {full} also by plain 2^n enumeration), {}",
        secs(el)
    ))
}

fn boundary_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut done = 0;
    let mut seed = 0;
    while done < 50 {
        seed += 1;
        let lambda = rng.random_range(20.0..=200.0);
        let mut cfg = PipelineConfig::geometry_only(Cuboid::unit(), PointModel::Poisson { lambda }, seed);
        cfg.cycle_heights = [rng.random(), rng.random(), rng.random(), rng.random()];
        if rng.random::<bool>() {
            cfg.weights = Weights { arc: ArcWeight::Length, facet: FacetWeight::Area };
        }
        let g = run_geometry(&cfg).map_err(|e| format!("seed {seed}: {e}"))?;
        let b = surface_boundary(&g.complex, &g.surface);
        check(b == g.cycle.chain(), || format!("seed {seed}: boundary differs from the cycle"))?;
        done += 1;
    }
    Ok(format!("50 instances, boundary == cycle in integers, {}", secs(start.elapsed())))
}

fn geometry_invariants() -> Outcome {
    let start = Instant::now();
    let q = Cuboid::unit();
    let mut report = Vec::new();
    for n in [2usize, 10, 100, 1000] {
        let nf = n as f64;
        let models = [
            PointModel::Poisson { lambda: nf },
            PointModel::MaternCluster { lambda_parent: nf / 10.0, mu_daughter: 10.0, radius: 0.1 },
            PointModel::Hardcore { lambda: nf, volume_fraction: 0.6 },
        ];
        for m in models {
            let pattern = (0..200u64)
                .map(|s| m.sample(&q, s))
                .find(|p| p.as_ref().map_or(true, |p| !p.is_empty()))
                .ok_or_else(|| format!("{m:?}: every seed gave an empty pattern"))?
                .map_err(|e| format!("{m:?}: {e}"))?;
            let cells = build_bounded_voronoi(&pattern, &q).map_err(|e| format!("{m:?}: {e}"))?;
            let vol: f64 = cells.iter().map(|c| c.volume()).sum();
            check(((vol - q.volume()) / q.volume()).abs() <= 1e-6, || format!("{m:?}: volume sum {vol}"))?;
            let k = extract_complex(&cells, 1e-9 * q.diameter()).map_err(|e| format!("{m:?}: {e}"))?;
            check(k.euler_characteristic() == 1, || format!("{m:?}: V-E+F-C = {}", k.euler_characteristic()))?;
            report.push(pattern.len());
        }
    }
    Ok(format!("12 patterns (sizes {report:?}), volumes and Euler exact, {}", secs(start.elapsed())))
}

fn runtime_claim() -> Outcome {
    let mut times = Vec::new();
    for seed in 1..=5 {
        let cfg = PipelineConfig::geometry_only(Cuboid::unit(), PointModel::Poisson { lambda: 500.0 }, seed);
        let t = Instant::now();
        run_geometry(&cfg).map_err(|e| format!("seed {seed}: {e}"))?;
        times.push(t.elapsed());
    }
    times.sort();
    let median = times[2];
    check(median <= Duration::from_secs(120), || format!("median {}", secs(median)))?;
    Ok(format!("unit cube, lambda 500, 5 seeds: median {} (max {})", secs(median), secs(times[4])))
}

fn raster_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut total_fg = 0;
    for inst in 0..20u64 {
        let dims = [rng.random_range(16..=64), rng.random_range(16..=64), rng.random_range(16..=64)];
        let q = Cuboid::new(dims[0] as f64, dims[1] as f64, dims[2] as f64).unwrap();
        let count = rng.random_range(20.0..150.0);
        let mut cfg = PipelineConfig::geometry_only(q, PointModel::Poisson { lambda: count / q.volume() }, inst + 1);
        cfg.weights = Weights { arc: ArcWeight::Length, facet: FacetWeight::Area };
        cfg.cycle_heights = [(); 4].map(|_| rng.random_range(0.25..0.75));
        let g = run_geometry(&cfg).map_err(|e| format!("instance {inst}: {e}"))?;
        let labels = rasterize_labels(&g.cells, &q, dims);
        check(labels == naive_labels(&g.pattern.points, q.extent(), dims), || format!("instance {inst}: label image differs"))?;
        let pairs = surface_pairs(&g.complex, &g.surface);
        let fast = rasterize_surface(&labels, &pairs);
        let slow = naive_surface_raster(&labels, &pairs);
        check(fast == slow, || format!("instance {inst}: surface raster differs from the 26-neighbour rule"))?;
        check(fast.foreground() > 0, || format!("instance {inst}: surface has no interior facet"))?;
        total_fg += fast.foreground();
    }
    Ok(format!("20 instances up to 64^3, bit-exact ({total_fg} foreground voxels), {}", secs(start.elapsed())))
}

fn morphology_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    for i in 0..5 {
        let j = random_binary(&mut rng, [24, 20, 18], 0.02);
        let out = adaptive_dilate(&j, &DilationSpec { p: 0.0, seed: i }).unwrap();
        check(out == j, || "p = 0 changed the volume".into())?;
        for p in [1.0, 0.3] {
            let spec = DilationSpec { p, seed: 100 + i };
            let walk = dilation_walk(24, &spec);
            if p == 1.0 {
                check(walk.iter().enumerate().all(|(x, &w)| w == x), || format!("p = 1 walk {walk:?}"))?;
            }
            let mut naive = j.clone();
            for (x, &w) in walk.iter().enumerate() {
                naive_dilate_slice(&mut naive, x, w);
            }
            check(adaptive_dilate(&j, &spec).unwrap() == naive, || format!("dilation with p = {p} differs from iterated element"))?;
        }
    }
    for i in 0..5 {
        let dims = [20, 24, 16];
        let q = Cuboid::new(20.0, 24.0, 16.0).unwrap();
        let j = random_binary(&mut rng, dims, 0.005);
        let gens: Vec<DVec3> =
            (0..60).map(|_| DVec3::new(rng.random::<f64>() * 20.0, rng.random::<f64>() * 24.0, rng.random::<f64>() * 16.0)).collect();
        let out = apply_microstructure_with(&j, &q, &gens);
        check(j.is_subset_of(&out), || format!("microstructure {i} lost foreground"))?;
        let fine = naive_labels(&gens, q.extent(), dims);
        let mut hit = vec![false; gens.len()];
        for (v, l) in j.data().iter().zip(fine.data()) {
            if *v != 0 {
                hit[*l as usize] = true;
            }
        }
        let expect: Vec<u8> = fine.data().iter().map(|&l| u8::from(hit[l as usize])).collect();
        check(out.data() == expect.as_slice(), || format!("microstructure {i} differs from the cell-union rule"))?;
    }
    for (i, r) in [(0, 1), (1, 1), (2, 2), (3, 1)] {
        let dims = [14 + i, 12, 13];
        let j = random_binary(&mut rng, dims, 0.3 + 0.1 * i as f64);
        check(median_filter_binary(&j, r).unwrap() == naive_median(&j, r), || format!("median r = {r} differs from recount"))?;
    }
    Ok("p=0 identity, p=1 walk = x, dilation/microstructure/median match their oracles".into())
}

fn embedding_locality() -> Outcome {
    let dims = [64, 64, 64];
    let patch = synthetic_background(dims, 30000.0, 1000.0, 3).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let gt = random_binary(&mut rng, dims, 0.4);
    let n = gt.foreground() as f64;
    let (mu, sd) = (5000.0, 800.0);
    let out = embed_crack(&patch, &gt, &GrayStats::manual(mu, sd), 0.0, 9).map_err(|e| e.to_string())?;
    let mean = gt.data().iter().zip(out.data()).filter(|(g, _)| **g != 0).map(|(_, &v)| f64::from(v)).sum::<f64>() / n;
    let bound = 4.0 * sd / n.sqrt();
    check((mean - mu).abs() <= bound, || format!("crack mean {mean} outside {mu} ± {bound}"))?;
    check(
        gt.data().iter().zip(out.data()).zip(patch.data()).all(|((g, o), p)| *g != 0 || o == p),
        || "sigma = 0 touched a background voxel".into(),
    )?;

    // thin planar crack, smoothing on
    let mut thin = BinaryVolume::new(dims);
    for y in 0..64 {
        for z in 0..64 {
            thin.set(31, y, z, 1);
            thin.set(32, y, (z + y / 8) % 64, 1);
        }
    }
    let out = embed_crack(&patch, &thin, &GrayStats::manual(mu, sd), 1.2, 10).map_err(|e| e.to_string())?;
    let h = halo(&thin);
    let outside = h.iter().zip(out.data()).zip(patch.data()).all(|((&inside, o), p)| inside || o == p);
    check(outside, || "voxel outside the crack halo changed".into())?;
    let changed = h.iter().zip(out.data()).zip(patch.data()).filter(|((&inside, o), p)| inside && o != p).count();
    check(changed > 0, || "smoothing changed nothing".into())?;
    Ok(format!("N = {n}, crack mean {mean:.1} (bound ±{bound:.2}), halo-only smoothing ({changed} voxels changed)"))
}

fn determinism_config() -> PipelineConfig {
    let q = Cuboid::new(40.0, 36.0, 32.0).unwrap();
    let mut cfg = PipelineConfig::geometry_only(q, PointModel::Poisson { lambda: 150.0 / q.volume() }, 21);
    cfg.rasterize = true;
    cfg.weights = Weights { arc: ArcWeight::Length, facet: FacetWeight::Area };
    cfg.branch = Some(BranchConfig { cycle_heights: [0.2, 0.4, 0.7, 0.9], dilate: true });
    cfg.dilation = DilationSpec { p: 0.1, seed: 22 };
    cfg.microstructure = Some(MicrostructureConfig { fine_lambda: 1500.0 / q.volume(), seed: 23 });
    cfg.embedding = Some(EmbeddingConfig {
        background: Background::Synthetic { mean: 30000.0, noise: 1200.0 },
        air: Some(AirStats { mean: 5000.0, std: 700.0 }),
        sigma: 0.7,
        seed: 24,
    });
    cfg
}

fn files_in(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect()
}

fn determinism() -> Outcome {
    let cfg = determinism_config();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut snapshots = Vec::new();
    for (run, threads) in [(0, 1), (1, 4), (2, 4)] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        let out = pool.install(|| run_pipeline(&cfg)).map_err(|e| e.to_string())?;
        let dir = tmp.path().join(format!("run{run}"));
        write_outputs(&out, &dir, true).map_err(|e| e.to_string())?;
        snapshots.push(files_in(&dir));
    }
    let first = &snapshots[0];
    for (i, s) in snapshots.iter().enumerate().skip(1) {
        check(s.keys().eq(first.keys()), || format!("run {i} wrote a different file set"))?;
        for (name, bytes) in s {
            check(first[name] == *bytes, || format!("run {i}: {name} differs"))?;
        }
    }
    let bytes: usize = first.values().map(Vec::len).sum();
    Ok(format!("3 runs (1, 4, 4 threads), {} files / {bytes} bytes identical", first.len()))
}

fn facet_area_cv(model: PointModel, seed: u64) -> Result<f64, String> {
    let mut cfg = PipelineConfig::geometry_only(Cuboid::unit(), model, seed);
    cfg.weights = Weights { arc: ArcWeight::Length, facet: FacetWeight::Area };
    let g = run_geometry(&cfg).map_err(|e| format!("seed {seed}: {e}"))?;
    let areas: Vec<f64> = g.surface.facets.iter().map(|&(f, _)| g.complex.facet_area(f)).collect();
    let n = areas.len() as f64;
    let mean = areas.iter().sum::<f64>() / n;
    let var = areas.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    Ok(var.sqrt() / mean)
}

fn facet_homogeneity() -> Outcome {
    let start = Instant::now();
    let (mut hc, mut po) = (0.0, 0.0);
    for seed in 0..20 {
        hc += facet_area_cv(PointModel::Hardcore { lambda: 1000.0, volume_fraction: 0.6 }, seed)?;
        po += facet_area_cv(PointModel::Poisson { lambda: 1000.0 }, seed)?;
    }
    let (hc, po) = (hc / 20.0, po / 20.0);
    check(hc < po, || format!("mean CV hardcore {hc:.4} not below Poisson {po:.4}"))?;
    Ok(format!("mean facet-area CV over 20 seeds: hardcore {hc:.4} < Poisson {po:.4}, {}", secs(start.elapsed())))
}

fn main() -> ExitCode {
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("spp-oracle", spp_oracle),
        ("msp-brute-force", msp_brute_force_equivalence),
        ("boundary-exactness", boundary_exactness),
        ("geometry-invariants", geometry_invariants),
        ("runtime", runtime_claim),
        ("raster-oracle", raster_oracle),
        ("morphology", morphology_properties),
        ("embedding", embedding_locality),
        ("determinism", determinism),
        ("facet-homogeneity", facet_homogeneity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if filter.as_ref().is_some_and(|p| !name.contains(p.as_str())) {
            continue;
        }
        match f() {
            Ok(detail) => println!("ACCEPT-{:02} {name}: PASS  {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("ACCEPT-{:02} {name}: FAIL  {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
