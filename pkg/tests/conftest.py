import pytest

from xling.bidict import BilingualDictionary
from xling.corpus import AlignedCorpus, Document


@pytest.fixture
def tiny_corpus() -> AlignedCorpus:
    """Three aligned pairs with overlapping vocabulary."""
    source = (
        Document("e1", "en", "olive oil is good oil"),
        Document("e2", "en", "the press makes oil"),
        Document("e3", "en", "markets rise on news"),
    )
    target = (
        Document("a1", "ar", "zayt zaytun jayid zayt"),
        Document("a2", "ar", "mitbaa tasna zayt"),
        Document("a3", "ar", "aswaq tartafi akhbar"),
    )
    return AlignedCorpus(source, target)


@pytest.fixture
def toy_dictionary() -> BilingualDictionary:
    return BilingualDictionary(
        [
            (("olive",), ("zaytun",)),
            (("oil",), ("zayt",)),
            (("good", "fine"), ("jayid",)),
            (("press",), ("mitbaa",)),
            (("market", "markets"), ("aswaq", "suq")),
        ]
    )
