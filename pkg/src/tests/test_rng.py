"""
Unit tests for the seeded random number generator.
"""
import os
import sys
import unittest

# Add the src directory to the sys.path to allow importing
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from rng import Rng


class TestRng(unittest.TestCase):
    def test_same_seed_same_draws(self):
        """Test that equal seeds replay the same sequence"""
        a, b = Rng(1234), Rng(1234)
        self.assertEqual([a.next_u32() for _ in range(20)], [b.next_u32() for _ in range(20)])

    def test_different_seeds_differ(self):
        a, b = Rng(1), Rng(2)
        self.assertNotEqual([a.next_u32() for _ in range(8)], [b.next_u32() for _ in range(8)])

    def test_seed_is_32_bit(self):
        self.assertEqual(Rng(2 ** 32 + 5).seed, 5)

    def test_draws_in_range(self):
        rng = Rng(7)
        for n in (1, 2, 3, 10, 1000):
            for _ in range(50):
                self.assertTrue(0 <= rng.range(n) < n)
        self.assertTrue(0 <= rng.next_u32() < 2 ** 32)
        with self.assertRaises(ValueError):
            rng.range(0)

    def test_shuffle_is_permutation(self):
        items = list(range(20))
        shuffled = Rng(3).shuffle(list(items))
        self.assertEqual(sorted(shuffled), items)
        self.assertEqual(Rng(3).shuffle(list(items)), shuffled)

    def test_sample(self):
        """Test that sample returns distinct picks and clamps r"""
        picks = Rng(9).sample(range(10), 4)
        self.assertEqual(len(set(picks)), 4)
        self.assertEqual(len(Rng(9).sample(range(3), 10)), 3)
        self.assertEqual(Rng(9).sample(range(3), 0), [])

    def test_split_streams(self):
        """Test that named substreams are reproducible and independent of the parent's draws"""
        parent = Rng(42)
        first = parent.split("pi:a").word(64)
        parent.next_u32()
        self.assertEqual(parent.split("pi:a").word(64), first)
        self.assertNotEqual(parent.split("pi:b").word(64), first)

    def test_word_width(self):
        rng = Rng(5)
        for nbits in (0, 1, 31, 32, 33, 100):
            self.assertLess(rng.word(nbits), 1 << nbits if nbits else 1)

    def test_is_even_mixes(self):
        rng = Rng(11)
        draws = {rng.is_even() for _ in range(64)}
        self.assertEqual(draws, {True, False})


if __name__ == '__main__':
    unittest.main()
