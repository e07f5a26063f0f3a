public class HelperTest {
    @Test
    private void hidden() {
    }
    public void helpRun() {
        char c = '"';
    }
}
