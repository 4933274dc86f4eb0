use proptest::prelude::*;
use tabsyn_core::neural::*;
use tabsyn_core::random;

fn build(seed: u64, widths: &[usize], hidden: Activation, head: Activation) -> DenseNet {
    let mut rng = random::seeded(seed);
    let layers = widths
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let act = if i + 2 == widths.len() { head } else { hidden };
            Dense::new(w[0], w[1], act, &mut rng)
        })
        .collect();
    DenseNet::new(layers).unwrap()
}

fn weighted_output(net: &DenseNet, x: &Matrix, g: &[f64]) -> f64 {
    net.predict(x).unwrap().data.iter().zip(g).map(|(o, w)| o * w).sum()
}

fn activation() -> impl Strategy<Value = Activation> {
    prop_oneof![
        Just(Activation::Tanh),
        Just(Activation::Identity),
        Just(Activation::LeakyRelu(LEAKY_SLOPE)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn backward_matches_central_differences(
        seed in 0u64..10_000,
        widths in prop::collection::vec(1usize..5, 2..5),
        hidden in activation(),
        head in prop_oneof![Just(Activation::Identity), Just(Activation::Softmax), Just(Activation::Tanh)],
        xs in prop::collection::vec(-2.0..2.0f64, 8),
    ) {
        let mut net = build(seed, &widths, hidden, head);
        let batch = 2;
        let x = Matrix { rows: batch, cols: widths[0], data: xs.iter().cycle().take(batch * widths[0]).copied().collect() };
        let out_dim = *widths.last().unwrap();
        let g: Vec<f64> = (0..batch * out_dim).map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.3 + 0.1).collect();
        let (_, tape) = net.forward_batch(&x).unwrap();
        let (grads, _) = net.backward(&tape, &Matrix { rows: batch, cols: out_dim, data: g.clone() }).unwrap();
        let analytic: Vec<f64> = grads.iter().flat_map(|s| s.to_vec()).collect();
        let h = 1e-6;
        let mut flat = 0;
        let lens: Vec<usize> = net.params().map(|s| s.len()).collect();
        for (block, &len) in lens.iter().enumerate() {
            for j in 0..len {
                let nudge = |net: &mut DenseNet, d: f64| {
                    net.params_mut().nth(block).unwrap()[j] += d;
                };
                nudge(&mut net, h);
                let up = weighted_output(&net, &x, &g);
                nudge(&mut net, -2.0 * h);
                let down = weighted_output(&net, &x, &g);
                nudge(&mut net, h);
                let numeric = (up - down) / (2.0 * h);
                let a = analytic[flat];
                let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
                prop_assert!(err < 1e-4, "param {flat}: {a} vs {numeric}");
                flat += 1;
            }
        }
    }

    #[test]
    fn gumbel_softmax_is_a_distribution(
        logits in prop::collection::vec(-5.0..5.0f64, 1..6),
        seed in 0u64..1000,
        temperature in 0.1..2.0f64,
    ) {
        let y = gumbel_softmax(&logits, temperature, &mut random::seeded(seed));
        prop_assert!(y.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!((y.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn adam_reduces_a_quadratic() {
    let mut net = build(1, &[1, 1], Activation::Identity, Activation::Identity);
    let mut state = AdamState::for_classifier(&net, 0.05);
    let x = Matrix::row_vector(&[1.0]);
    let loss = |net: &DenseNet| (net.predict(&x).unwrap().data[0] - 3.0).powi(2);
    let before = loss(&net);
    for _ in 0..300 {
        let (out, tape) = net.forward_batch(&x).unwrap();
        let g = Matrix::row_vector(&[2.0 * (out.data[0] - 3.0)]);
        let (grads, _) = net.backward(&tape, &g).unwrap();
        adam_step(&mut net, &grads, &mut state).unwrap();
    }
    assert!(loss(&net) < 1e-3 * before);
}

#[test]
fn dropout_is_off_at_inference() {
    let mut rng = random::seeded(2);
    let layers = vec![
        Dense::new(3, 8, Activation::Relu, &mut rng).with_dropout(0.5),
        Dense::new(8, 1, Activation::Identity, &mut rng),
    ];
    let net = DenseNet::new(layers).unwrap();
    let x = Matrix::row_vector(&[0.5, -1.0, 2.0]);
    assert_eq!(net.predict(&x).unwrap(), net.predict(&x).unwrap());
    let (a, _) = net.forward_train(&x, &mut rng).unwrap();
    let (b, _) = net.forward_train(&x, &mut rng).unwrap();
    assert_ne!(a, b);
}
