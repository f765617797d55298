use metaspike::{LeakKind, PotentialList, SetKind};
use proptest::prelude::*;

fn non_null() -> impl Strategy<Value = PotentialList> {
    sized(2..=12)
}

fn sized(ns: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = PotentialList> {
    ns.prop_flat_map(|n| prop::collection::vec(0u64..(3 * n as u64), n))
        .prop_map(|mut v| {
            let m = *v.iter().min().unwrap();
            v.iter_mut().for_each(|x| *x -= m);
            if v.iter().all(|&x| x == 0) {
                v[0] = 1;
            }
            PotentialList::new(v).unwrap()
        })
}

proptest! {
    #[test]
    fn spike_stays_in_state_space(u in non_null(), pick in any::<prop::sample::Index>()) {
        let live: Vec<usize> = (0..u.n()).filter(|&a| u.as_slice()[a] > 0).collect();
        let a = live[pick.index(live.len())];
        let v = u.apply_spike(a).unwrap();
        prop_assert_eq!(v.as_slice()[a], 0);
        for b in (0..u.n()).filter(|&b| b != a) {
            prop_assert_eq!(v.as_slice()[b], u.as_slice()[b] + 1);
        }
        prop_assert!(PotentialList::new(v.as_slice().to_vec()).is_ok());
    }

    #[test]
    fn leaks_stay_in_state_space(u in non_null(), pick in any::<prop::sample::Index>()) {
        let a = pick.index(u.n());
        let r = u.apply_leak(a, LeakKind::Reset).unwrap();
        let d = u.apply_leak(a, LeakKind::Decrement).unwrap();
        prop_assert!(PotentialList::new(r.as_slice().to_vec()).is_ok());
        prop_assert!(PotentialList::new(d.as_slice().to_vec()).is_ok());
        prop_assert_eq!(r.as_slice()[a], 0);
        prop_assert_eq!(d.as_slice()[a], u.as_slice()[a].saturating_sub(1));
        if u.as_slice()[a] <= 1 {
            prop_assert_eq!(&r, &d);
        }
    }

    #[test]
    fn rank_order_is_stable_sort(u in non_null()) {
        let order = u.rank_order();
        let keys: Vec<(u64, usize)> = order.as_slice().iter().map(|&a| (u.as_slice()[a], a)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        prop_assert_eq!(keys, sorted);
    }

    #[test]
    fn top_rank_spikes_reach_ladder(u in non_null()) {
        let mut x = u.clone();
        for _ in 0..u.n() - 1 {
            x = x.apply_spike(x.rank_order().top()).unwrap();
        }
        prop_assert!(SetKind::L.contains(&x));
    }

    #[test]
    fn membership_matches_flags(u in non_null()) {
        let f = u.classify();
        for k in SetKind::ALL {
            prop_assert_eq!(k.contains(&u), f.get(k));
        }
        if f.in_l {
            prop_assert!(f.in_w);
        }
    }

    // at n = 2, (0,1) is in W but has one distinct positive value
    #[test]
    fn w_lies_in_every_s_set(u in sized(5..=16)) {
        let f = u.classify();
        if f.in_w {
            prop_assert!(f.in_s1 && f.in_s2 && f.in_s3);
        }
    }

    #[test]
    fn partial_ladders_lie_in_every_s_set(n in 5usize..=40, seed in any::<u64>()) {
        let mut rng = metaspike::derive_stream(seed, 0).rng();
        let u = metaspike::coupling::sample_w(n, &mut rng).unwrap();
        let f = u.classify();
        prop_assert!(f.in_w && f.in_s1 && f.in_s2 && f.in_s3);
    }

    #[test]
    fn spike_weights_normalise(u in non_null(), base in 1.1f64..20.0) {
        let w = u.spike_weights(base);
        let total: f64 = (0..u.n()).map(|b| w.probability(b)).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for b in 0..u.n() {
            prop_assert_eq!(w.weight(b) == 0.0, u.as_slice()[b] == 0);
        }
    }
}
