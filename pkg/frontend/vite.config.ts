import { defineConfig } from "vitest/config";

// The dev server proxies API calls to a locally running `tunesmith serve`;
// production builds bake in VITE_API_BASE (empty = same origin).
export default defineConfig({
  server: {
    proxy: {
      "/api": "http://127.0.0.1:8000",
      "/healthz": "http://127.0.0.1:8000",
    },
  },
  build: {
    // abcjs ships as one large engraving+synth bundle; keep it in its own
    // cacheable chunk and size the warning threshold around it.
    chunkSizeWarningLimit: 600,
    rollupOptions: {
      output: {
        manualChunks: { abcjs: ["abcjs"] },
      },
    },
  },
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
  },
});
