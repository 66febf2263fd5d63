import { defineConfig } from "vite";

export default defineConfig({
  server: {
    proxy: {
      // during development the python service runs separately
      "/api": "http://127.0.0.1:8000",
    },
  },
  test: {
    environment: "node",
    testTimeout: 60000,
    hookTimeout: 120000,
  },
});
