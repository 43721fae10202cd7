import { ApiClient } from "./api.js";
import { createApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const app = createApp(root, new ApiClient(""), window);
  void app.start();
}
