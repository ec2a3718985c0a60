use satgraph::data::{
    generate_records, generate_synthetic, prepare, read_csv, write_csv, Cell, FieldEncoding, Schema, Source,
    SplitSpec, SynthConfig, Task,
};
use satgraph::layers::ModelConfig;
use satgraph::training::{evaluate, train, TrainConfig};

fn slot_tokens(cells: &[Cell]) -> Vec<Option<String>> {
    cells
        .iter()
        .map(|c| match c {
            Cell::Categorical(v) => v.clone(),
            Cell::Numeric(_) => panic!("motif slots are categorical"),
        })
        .collect()
}

/// Scans every center position for `a`, `b`, `a`.
fn motif_oracle(tokens: &[Option<String>]) -> bool {
    (1..tokens.len().saturating_sub(1)).any(|i| {
        tokens[i].as_deref() == Some("b") && tokens[i - 1].as_deref() == Some("a") && tokens[i + 1].as_deref() == Some("a")
    })
}

#[test]
fn motif_labels_match_independent_detector() {
    let (_, table) = generate_records(&SynthConfig::default()).unwrap();
    assert_eq!(table.len(), 2000);
    for (i, r) in table.records.iter().enumerate() {
        assert_eq!(u8::from(motif_oracle(&slot_tokens(&r.cells))), r.label, "record {i}");
    }
    let pos = table.labels().iter().filter(|&&l| l == 1).count() as f64;
    assert!((pos / 2000.0 - 0.5).abs() <= 0.05, "{pos}");
}

#[test]
fn motif_sizes_follow_node_range() {
    let cfg = SynthConfig {
        min_nodes: 6,
        max_nodes: 9,
        n_graphs: 300,
        ..SynthConfig::default()
    };
    let (schema, table) = generate_records(&cfg).unwrap();
    assert_eq!(schema.n_features(), 8);
    for r in &table.records {
        let populated = r.cells.iter().take_while(|c| matches!(c, Cell::Categorical(Some(_)))).count();
        assert!((5..=8).contains(&populated));
        assert!(r.cells[populated..].iter().all(|c| *c == Cell::Categorical(None)));
    }
}

#[test]
fn neighbor_labels_follow_the_top_score() {
    let cfg = SynthConfig {
        task: Task::DistinguishedNeighbor,
        ..SynthConfig::default()
    };
    let (_, table) = generate_records(&cfg).unwrap();
    for r in &table.records {
        let mut best: Option<(f64, &str)> = None;
        for pair in r.cells.chunks(2) {
            if let (Cell::Numeric(Some(s)), Cell::Categorical(Some(v))) = (&pair[0], &pair[1]) {
                if best.is_none_or(|(b, _)| *s > b) {
                    best = Some((*s, v));
                }
            }
        }
        assert_eq!(u8::from(best.unwrap().1 == "hi"), r.label);
    }
    let pos = table.labels().iter().filter(|&&l| l == 1).count() as f64;
    assert!((pos / 2000.0 - 0.5).abs() <= 0.05);
}

#[test]
fn synthetic_csv_round_trips() {
    for task in [Task::Motif, Task::DistinguishedNeighbor] {
        let cfg = SynthConfig {
            task,
            n_graphs: 120,
            ..SynthConfig::default()
        };
        let (schema, table) = generate_records(&cfg).unwrap();
        let mut csv = Vec::new();
        write_csv(&mut csv, &schema, &table).unwrap();
        let schema_back = Schema::from_toml_str(&schema.to_toml_string().unwrap()).unwrap();
        assert_eq!(schema_back, schema);
        let back = read_csv(csv.as_slice(), &schema_back).unwrap();
        assert_eq!(back.records, table.records);
        assert_eq!(back.imputed, table.imputed);
        assert!(schema.provenance.contains(&format!("task = {}", task.name())));
    }
}

#[test]
fn scaler_is_fitted_on_training_rows_only() {
    let cfg = SynthConfig {
        task: Task::DistinguishedNeighbor,
        n_graphs: 400,
        ..SynthConfig::default()
    };
    let (schema, table) = generate_records(&cfg).unwrap();
    let p = prepare::<f64>(&schema, &table, &SplitSpec::default(), Source::Synthetic).unwrap();
    let FieldEncoding::Numeric { mean, .. } = &p.encoder.fields[0] else { panic!("score_0 is numeric") };
    let train_scores: Vec<f64> = p
        .indices
        .train
        .iter()
        .filter_map(|&i| match table.records[i].cells[0] {
            Cell::Numeric(v) => v,
            _ => None,
        })
        .collect();
    let want = train_scores.iter().sum::<f64>() / train_scores.len() as f64;
    assert!((mean - want).abs() < 1e-12);
    assert_eq!(p.train.len() + p.val.len() + p.test.len(), 400);
}

#[test]
fn training_reduces_loss_and_is_deterministic() {
    let cfg = SynthConfig {
        n_graphs: 300,
        ..SynthConfig::default()
    };
    let (schema, table) = generate_records(&cfg).unwrap();
    let p = prepare::<f64>(&schema, &table, &SplitSpec::default(), Source::Synthetic).unwrap();
    let model = ModelConfig::default();
    let tc = TrainConfig {
        epochs: 8,
        learning_rate: 5e-3,
        seed: 5,
        ..TrainConfig::default()
    };
    let a = train(&p.train, Some(&p.val), &model, &tc).unwrap();
    let first = a.history.first().unwrap().train_loss;
    let last = a.history.last().unwrap().train_loss;
    assert!(last < first, "{first} -> {last}");
    let b = train(&p.train, Some(&p.val), &model, &tc).unwrap();
    assert_eq!(a.params, b.params);
    assert_eq!(a.history, b.history);

    let zero = TrainConfig { epochs: 0, ..tc };
    let init = train(&p.train, None, &model, &zero).unwrap();
    assert!(init.history.is_empty());
    assert_ne!(init.params, a.params);
}

#[test]
fn single_class_training_set_is_rejected() {
    let cfg = SynthConfig {
        n_graphs: 60,
        ..SynthConfig::default()
    };
    let mut data = generate_synthetic::<f64>(&cfg).unwrap();
    for s in &mut data.items {
        s.label = 1;
    }
    assert!(train(&data, None, &ModelConfig::default(), &TrainConfig::default()).is_err());
}

#[test]
fn single_precision_trains() {
    let cfg = SynthConfig {
        n_graphs: 200,
        ..SynthConfig::default()
    };
    let (schema, table) = generate_records(&cfg).unwrap();
    let p = prepare::<f32>(&schema, &table, &SplitSpec::default(), Source::Synthetic).unwrap();
    let tc = TrainConfig {
        epochs: 5,
        learning_rate: 5e-3,
        ..TrainConfig::default()
    };
    let out = train(&p.train, Some(&p.val), &ModelConfig::default(), &tc).unwrap();
    assert!(out.history.iter().all(|r| r.train_loss.is_finite()));
    assert!(out.history.last().unwrap().train_loss < out.history[0].train_loss);
    let ev = evaluate(&p.test, &out.params, &ModelConfig::default()).unwrap();
    assert!(ev.scores.iter().all(|s| (0.0..=1.0).contains(s)));
}
