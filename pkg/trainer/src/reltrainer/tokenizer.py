"""Word-level tokenizer whose boundary tags are atomic vocabulary items."""

import re

PAD_TOKEN = "[PAD]"
UNK_TOKEN = "[UNK]"
CLS_TOKEN = "[CLS]"
SEP_TOKEN = "[SEP]"
SPECIAL_TOKENS = (PAD_TOKEN, UNK_TOKEN, CLS_TOKEN, SEP_TOKEN)

_WORD_RE = re.compile(r"[A-Za-z0-9_]+|[^\sA-Za-z0-9_]")


def boundary_tag_tokens(codes):
    """Open/close tag tokens for a set of boundary-tag codes, sorted."""
    tokens = []
    for code in sorted(set(codes)):
        tokens.append(f"<{code}>")
        tokens.append(f"</{code}>")
    return tokens


class Tokenizer:
    """Fixed vocabulary built from a training file.

    Layout: the four special tokens first, then tag tokens in sorted
    order, then words by descending frequency (ties alphabetic), so the
    same training file always yields the same token ids.
    """

    def __init__(self, tokens):
        if tuple(tokens[:4]) != SPECIAL_TOKENS:
            raise ValueError("vocabulary must start with the special tokens")
        if len(set(tokens)) != len(tokens):
            raise ValueError("duplicate vocabulary token")
        self.tokens = tuple(tokens)
        self.ids = {token: index for index, token in enumerate(self.tokens)}
        self.tag_tokens = tuple(
            t for t in tokens if t.startswith("<") and t.endswith(">")
        )
        self._tag_re = (
            re.compile(
                "(" + "|".join(re.escape(tag) for tag in self.tag_tokens) + ")"
            )
            if self.tag_tokens
            else None
        )

    def __len__(self):
        return len(self.tokens)

    @classmethod
    def build(cls, instances):
        """Collect tag tokens and word frequencies from training instances."""
        codes = set()
        for inst in instances:
            codes.update(inst.tag_codes())
        tags = boundary_tag_tokens(codes)
        tag_re = (
            re.compile("(" + "|".join(re.escape(tag) for tag in tags) + ")")
            if tags
            else None
        )
        tag_set = set(tags)
        counts = {}
        for inst in instances:
            for text in (inst.prompt, inst.context):
                for token in _split_words(text, tag_re, tag_set):
                    if token in tag_set:
                        continue
                    counts[token] = counts.get(token, 0) + 1
        words = sorted(counts, key=lambda token: (-counts[token], token))
        return cls(list(SPECIAL_TOKENS) + tags + words)

    def tokenize(self, text):
        return _split_words(text, self._tag_re, set(self.tag_tokens))

    def encode(self, instance, max_length):
        """[CLS] + prompt + [SEP] + tagged context, truncated from the end.

        Returns (ids, truncated) where truncated flags a dropped tail.
        """
        tokens = (
            [CLS_TOKEN]
            + self.tokenize(instance.prompt)
            + [SEP_TOKEN]
            + self.tokenize(instance.context)
        )
        truncated = len(tokens) > max_length
        unk = self.ids[UNK_TOKEN]
        return [self.ids.get(t, unk) for t in tokens[:max_length]], truncated


def _split_words(text, tag_re, tag_tokens):
    tokens = []
    segments = tag_re.split(text) if tag_re is not None else [text]
    for segment in segments:
        if segment in tag_tokens:
            tokens.append(segment)
        else:
            tokens.extend(match.lower() for match in _WORD_RE.findall(segment))
    return tokens
