//! The spike and leak maps, rank orders and set membership on a few lists.

use metaspike::{LeakKind, PotentialList, SetKind};

fn main() -> metaspike::Result<()> {
    let u = PotentialList::new(vec![0, 3, 1])?;
    println!("u = {u}");
    println!("spike neuron 1      -> {}", u.apply_spike(1)?);
    println!("reset leak neuron 1 -> {}", u.apply_leak(1, LeakKind::Reset)?);
    println!("decrement neuron 1  -> {}", u.apply_leak(1, LeakKind::Decrement)?);

    let tied = PotentialList::new(vec![2, 0, 2, 1])?;
    println!("rank order of {tied}: {:?}", tied.rank_order().as_slice());

    // spiking the top-ranked neuron n-1 times always lands on a ladder
    let mut x = PotentialList::new(vec![0, 5, 2])?;
    for _ in 0..x.n() - 1 {
        x = x.apply_spike(x.rank_order().top())?;
    }
    println!("after top spikes: {x}, ladder = {}", SetKind::L.contains(&x));

    for v in [
        vec![0, 1, 2, 3, 4, 5, 6, 7, 8],
        vec![0, 1, 2, 3, 4, 5, 6, 9, 11],
        vec![0, 0, 4, 4, 4, 4, 4, 4, 4],
    ] {
        let u = PotentialList::new(v)?;
        let f = u.classify();
        println!(
            "{u}: S0 {} S1 {} S2 {} S3 {} W {} L {}",
            f.in_s0, f.in_s1, f.in_s2, f.in_s3, f.in_w, f.in_l
        );
    }
    Ok(())
}
