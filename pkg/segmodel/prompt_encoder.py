"""
Box prompt encoder

A box becomes two sparse tokens: the positional encoding of each corner plus a
learned corner-type embedding. The dense prompt is a learned "no mask" embedding
broadcast over the image-embedding grid.
"""

import torch
from torch import nn

from .layers import PositionEmbeddingRandom


class BoxPromptEncoder(nn.Module):
    def __init__(self, embed_dim, image_embedding_size):
        super().__init__()
        self.embed_dim = embed_dim
        self.image_embedding_size = tuple(image_embedding_size)
        self.pe_layer = PositionEmbeddingRandom(embed_dim // 2)
        # 0: top-left corner, 1: bottom-right corner
        self.corner_embeddings = nn.ModuleList(
            nn.Embedding(1, embed_dim) for _ in range(2)
        )
        self.no_mask_embed = nn.Embedding(1, embed_dim)

    def get_dense_pe(self):
        """Positional encoding of the image-embedding grid, (1, C, h, w)"""
        return self.pe_layer(self.image_embedding_size).unsqueeze(0)

    def dense_embeddings(self, batch_size):
        height, width = self.image_embedding_size
        return self.no_mask_embed.weight.reshape(1, -1, 1, 1).expand(
            batch_size, -1, height, width
        )

    def forward(self, corners):
        """
        Args:
            corners: (B, 2, 2) box corners (x, y) scaled to [0, 1]

        Returns:
            Sparse embeddings (B, 2, C)
        """
        embedding = self.pe_layer.forward_with_coords(corners)
        corner_types = torch.cat(
            [self.corner_embeddings[0].weight, self.corner_embeddings[1].weight], dim=0
        )
        return embedding + corner_types.unsqueeze(0)
